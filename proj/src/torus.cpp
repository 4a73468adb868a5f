#include "pulsesync/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "pulsesync/errors.hpp"
#include "pulsesync/evolve.hpp"
#include "pulsesync/parallel.hpp"
#include "pulsesync/stats.hpp"

namespace pulsesync {

CoefficientTable::CoefficientTable(const ReducedModel& reduced) : K_(reduced.noise.K) {
  mask_.assign(2 * K_ + 1, 0);
  for (int k = -K_; k <= K_; ++k)
    if (reduced.noise.alpha_at(k) != 0.0) {
      modes_.push_back(k);
      mask_[k + K_] = 1;
    }
  std::vector<const TrigSeries*> series = {&reduced.a, &reduced.a_prime, &reduced.strat};
  for (int k : modes_) {
    series.push_back(&reduced.b_at(k));
    series.push_back(&reduced.b_prime_at(k));
  }
  for (const auto* s : series) order_ = std::max(order_, s->order());
  rows_ = static_cast<int>(series.size());
  const int width = 2 * order_ + 1;
  coeffs_.assign(static_cast<std::size_t>(rows_) * width, 0.0);
  for (int r = 0; r < rows_; ++r) {
    double* row = &coeffs_[static_cast<std::size_t>(r) * width];
    row[0] = series[r]->mean();
    for (int m = 1; m <= series[r]->order(); ++m) {
      row[m] = series[r]->cos_coeff(m);
      row[order_ + m] = series[r]->sin_coeff(m);
    }
  }
  harmonics_.resize(width);
}

CoefficientTable::Values CoefficientTable::make_values() const {
  Values v;
  v.b.assign(modes_.size(), 0.0);
  v.b_prime.assign(modes_.size(), 0.0);
  return v;
}

void CoefficientTable::evaluate(double x, Values& out, unsigned fields) const {
  const int width = 2 * order_ + 1;
  double* h = harmonics_.data();
  h[0] = 1.0;
  if (order_ > 0) {
    const double th = 2.0 * std::numbers::pi * (x - std::floor(x));
    const double c1 = std::cos(th), s1 = std::sin(th);
    double c = c1, s = s1;
    h[1] = c;
    h[order_ + 1] = s;
    for (int m = 2; m <= order_; ++m) {
      const double cn = c * c1 - s * s1;
      const double sn = s * c1 + c * s1;
      c = cn;
      s = sn;
      h[m] = c;
      h[order_ + m] = s;
    }
  }
  auto row = [&](int r) {
    const double* a = &coeffs_[static_cast<std::size_t>(r) * width];
    double sum = 0.0;
    for (int i = 0; i < width; ++i) sum += a[i] * h[i];
    return sum;
  };
  if (fields & drift) out.a = row(0);
  if (fields & derivatives) out.a_prime = row(1);
  if (fields & strat) out.strat = row(2);
  for (std::size_t j = 0; j < modes_.size(); ++j) {
    out.b[j] = row(3 + 2 * static_cast<int>(j));
    if (fields & derivatives) out.b_prime[j] = row(4 + 2 * static_cast<int>(j));
  }
}

TorusEnsemble::TorusEnsemble(std::vector<double> initial, double t)
    : lifts(std::move(initial)), time(t) {}

std::vector<double> TorusEnsemble::positions() const {
  std::vector<double> out(lifts.size());
  for (std::size_t i = 0; i < lifts.size(); ++i) out[i] = wrap(lifts[i]);
  return out;
}

namespace {

double noise_sum(const std::vector<double>& coef, const std::vector<int>& modes,
                 const std::vector<double>& inc, int K) {
  double s = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j) s += coef[j] * inc[modes[j] + K];
  return s;
}

}  // namespace

Trajectory simulate(const ReducedModel& reduced, double sigma, TorusEnsemble& ens,
                    const NoisePath& path, double duration, const SimulationOptions& options) {
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be nonnegative");
  if (path.K() < reduced.noise.K) throw ValidationError("noise path has fewer modes than the model");
  if (options.stride < 0) throw ValidationError("record stride must be nonnegative");
  const double dt = path.dt();
  const long steps = step_count(duration, dt);
  const CoefficientTable table(reduced);
  const int K = path.K();
  const std::size_t m = ens.lifts.size();
  if (options.tangent) ens.log_tangent.resize(m, 0.0);

  // Restrict the model's modes to the path's index range.
  std::vector<char> mask(2 * K + 1, 0);
  for (int k : table.modes()) mask[k + K] = 1;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return ens.lifts[i] < ens.lifts[j]; });

  Trajectory rec;
  const double t0 = ens.time;
  auto record = [&](long s) {
    rec.steps.push_back(s);
    rec.times.push_back(t0 + static_cast<double>(s) * dt);
    rec.lifts.push_back(ens.lifts);
    if (options.tangent) rec.tangent.push_back(ens.log_tangent);
  };
  record(0);

  auto v0 = table.make_values();
  auto v1 = table.make_values();
  std::vector<double> inc(2 * K + 1);
  const double c = reduced.speed;
  const double s2 = sigma * sigma;
  for (long s = 0; s < steps; ++s) {
    path.increments(s, inc, mask);
    for (std::size_t i = 0; i < m; ++i) {
      double& x = ens.lifts[i];
      if (options.scheme == Scheme::ito_euler) {
        table.evaluate(x, v0, options.tangent ? CoefficientTable::drift | CoefficientTable::derivatives
                                              : CoefficientTable::drift);
        const double x_new = x + (c + s2 * v0.a) * dt + sigma * noise_sum(v0.b, table.modes(), inc, K);
        if (options.tangent) {
          double bp2 = 0.0;
          for (double b : v0.b_prime) bp2 += b * b;
          ens.log_tangent[i] += s2 * (v0.a_prime - 0.5 * bp2) * dt +
                                sigma * noise_sum(v0.b_prime, table.modes(), inc, K);
        }
        x = x_new;
      } else {
        table.evaluate(x, v0, CoefficientTable::strat);
        const double f0 = c + s2 * v0.strat;
        const double g0 = sigma * noise_sum(v0.b, table.modes(), inc, K);
        const double pred = x + f0 * dt + g0;
        table.evaluate(pred, v1, CoefficientTable::strat);
        const double f1 = c + s2 * v1.strat;
        const double g1 = sigma * noise_sum(v1.b, table.modes(), inc, K);
        x = x + 0.5 * (f0 + f1) * dt + 0.5 * (g0 + g1);
      }
    }
    for (std::size_t i = 1; i < m; ++i)
      if (ens.lifts[order[i - 1]] > ens.lifts[order[i]]) {
        ++rec.order_violations;
        break;
      }
    const long done = s + 1;
    if ((options.stride > 0 && done % options.stride == 0) || done == steps) {
      ens.time = t0 + static_cast<double>(done) * dt;
      if (rec.steps.back() != done) record(done);
    }
  }
  ens.time = t0 + static_cast<double>(steps) * dt;
  return rec;
}

double default_dt(const ReducedModel& reduced, double sigma, double cap) {
  double amax = 0.0, bmax = 0.0;
  for (int i = 0; i < 512; ++i) {
    const double x = i / 512.0;
    amax = std::max(amax, std::fabs(reduced.a(x)));
    for (const auto& b : reduced.b) bmax = std::max(bmax, std::fabs(b(x)));
  }
  const double dt =
      1e-2 / (1.0 + sigma * sigma * amax + sigma * bmax * static_cast<double>(reduced.noise.K));
  return cap > 0.0 ? std::min(dt, cap) : dt;
}

LyapunovEstimate tangent_lyapunov_mc(const ReducedModel& reduced, double sigma, double x0,
                                     const NoisePath& path, double duration, double burn_in,
                                     int batches) {
  if (!(duration > burn_in) || burn_in < 0.0)
    throw ValidationError("Lyapunov run must be longer than its burn-in");
  const double dt = path.dt();
  const long burn = step_count(burn_in, dt);
  const long total = step_count(duration, dt);
  const long per_batch = (total - burn) / batches;
  if (per_batch < 1) throw ValidationError("too few steps per batch");

  TorusEnsemble ens({x0});
  SimulationOptions opt;
  opt.tangent = true;
  opt.stride = 0;
  simulate(reduced, sigma, ens, path, static_cast<double>(burn) * dt, opt);
  std::vector<double> slopes;
  long offset = burn;
  for (int b = 0; b < batches; ++b) {
    const double ell0 = ens.log_tangent[0];
    simulate(reduced, sigma, ens, path.shifted(offset), static_cast<double>(per_batch) * dt, opt);
    offset += per_batch;
    slopes.push_back((ens.log_tangent[0] - ell0) / (static_cast<double>(per_batch) * dt));
  }
  const auto bm = stats::batch_means(slopes, batches);
  return {bm.mean, bm.stderr_, batches};
}

SyncResult sync_time(const ReducedModel& reduced, double sigma, double x0, double y0,
                     double threshold, const NoisePath& path, double horizon) {
  if (!(threshold > 0.0)) throw ValidationError("sync threshold must be positive");
  SyncResult out;
  if (torus_distance(wrap(x0), wrap(y0)) < threshold || threshold >= 0.5) return out;

  const double dt = path.dt();
  const long steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  const CoefficientTable table(reduced);
  const int K = path.K();
  std::vector<char> mask(2 * K + 1, 0);
  for (int k : table.modes()) mask[k + K] = 1;
  auto vx = table.make_values();
  auto vy = table.make_values();
  std::vector<double> inc(2 * K + 1);
  const double c = reduced.speed, s2 = sigma * sigma;
  double x = x0, y = y0;
  const bool ordered = x0 < y0;
  for (long s = 0; s < steps; ++s) {
    path.increments(s, inc, mask);
    table.evaluate(x, vx, CoefficientTable::drift);
    table.evaluate(y, vy, CoefficientTable::drift);
    x += (c + s2 * vx.a) * dt + sigma * noise_sum(vx.b, table.modes(), inc, K);
    y += (c + s2 * vy.a) * dt + sigma * noise_sum(vy.b, table.modes(), inc, K);
    if ((x < y) != ordered) ++out.order_violations;
    if (torus_distance(wrap(x), wrap(y)) < threshold) {
      out.steps = s + 1;
      out.time = static_cast<double>(s + 1) * dt;
      return out;
    }
  }
  out.steps = steps;
  out.censored = true;
  out.time = std::numeric_limits<double>::infinity();
  return out;
}

ScanResult sync_scaling_scan(const ReducedModel& reduced, const std::vector<double>& sigmas,
                             int reps, const ScanOptions& options) {
  if (sigmas.size() < 2) throw ValidationError("scaling scan needs at least two sigma values");
  if (reps < 1) throw ValidationError("scaling scan needs at least one repetition");
  const auto [lo, hi] = std::minmax_element(sigmas.begin(), sigmas.end());
  if (!(*lo > 0.0) || *hi < 4.0 * *lo)
    throw ValidationError("sigma list must be positive and span at least a factor 4");

  ScanResult out;
  for (double sigma : sigmas) {
    ScanRow row;
    row.sigma = sigma;
    row.dt = default_dt(reduced, sigma, options.dt_cap);
    row.reps = reps;
    row.times.assign(reps, 0.0);
    std::vector<long> violations(reps, 0);
    const double horizon = options.horizon_factor / (sigma * sigma);
    parallel_for(
        static_cast<std::size_t>(reps),
        [&](std::size_t r) {
          const NoisePath path(options.seed + r, reduced.noise.K, row.dt);
          const auto res = sync_time(reduced, sigma, options.x0, options.y0, options.threshold,
                                     path, horizon);
          row.times[r] = res.time;
          violations[r] = res.order_violations;
        },
        options.threads);
    for (int r = 0; r < reps; ++r) {
      if (std::isinf(row.times[r])) ++row.censored;
      row.order_violations += violations[r];
    }
    row.unreliable = row.censored > 0.2 * reps;
    row.median_time = stats::median(row.times);
    out.rows.push_back(std::move(row));
  }
  std::vector<double> lx, ly;
  for (const auto& r : out.rows)
    if (std::isfinite(r.median_time)) {
      lx.push_back(std::log(r.sigma));
      ly.push_back(std::log(r.median_time));
    }
  out.slope = lx.size() >= 2 ? stats::linear_fit(lx, ly).slope
                             : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace pulsesync
