// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "pulsesync/errors.hpp"
#include "pulsesync/isochron.hpp"
#include "pulsesync/measure.hpp"
#include "pulsesync/pulse.hpp"
#include "pulsesync/reduction.hpp"
#include "pulsesync/rng.hpp"
#include "pulsesync/spde.hpp"
#include "pulsesync/squeeze.hpp"
#include "pulsesync/stats.hpp"
#include "pulsesync/torus.hpp"

using namespace pulsesync;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = false;
  std::string summary;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void detail(const std::string& s) { std::printf("    %s\n", s.c_str()); std::fflush(stdout); }

double series_variation(const TrigSeries& s) {
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 1024; ++i) {
    const double v = s(i / 1024.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

double series_sup(const TrigSeries& s) {
  double m = 0.0;
  for (int i = 0; i < 1024; ++i) m = std::max(m, std::fabs(s(i / 1024.0)));
  return m;
}

// Sum of Gaussian bumps in both components near the pulse.
FieldState smooth_direction(const Grid1D& g, double centre, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FieldState f(g, 2);
  for (int b = 0; b < 3; ++b) {
    const double c = centre + 3.0 * u(rng);
    const double w = 0.65 + 0.35 * u(rng);
    const double au = u(rng), av = 0.3 * u(rng);
    for (int i = 0; i < g.points(); ++i) {
      double d = g.coordinate(i) - c;
      d -= g.length() * std::round(d / g.length());
      const double e = std::exp(-d * d / (2 * w * w));
      f.at(0, i) += au * e;
      f.at(1, i) += av * e;
    }
  }
  return (1.0 / norm(f)) * f;
}

double pulse_centre(const PulseSolution& p) {
  const auto u = p.profile.component(0);
  const auto it = std::max_element(u.begin(), u.end());
  return p.grid().coordinate(static_cast<int>(it - u.begin()));
}

Outcome c1_pulse() {
  const auto t0 = Clock::now();
  const ModelSpec m = fixtures::fhn();
  const auto [guess, speed] = simulated_pulse_guess(m, Grid1D(16, 1024));
  const PulseSolution p = find_pulse(m, guess, speed);
  const double wall = seconds_since(t0);
  detail(fmt("N=1024 c=%.12f residual=%.2e newton=%d", p.speed, p.bvp_residual, p.newton_iterations));
  detail(fmt("near-zero eigenvalues=%d lambda0=%.2e cosine-1=%.2e a_gap=%.5f runtime=%.1fs",
             p.near_zero_count, p.zero_eigenvalue, p.eigenvector_cosine - 1.0, p.a_gap, wall));
  const bool pass = p.bvp_residual <= 1e-8 && p.near_zero_count == 1 &&
                    std::fabs(p.zero_eigenvalue) <= 1e-6 && p.eigenvector_cosine >= 1.0 - 1e-6 &&
                    p.a_gap > 0.0 && wall <= 60.0;
  return {pass, fmt("residual %.1e, one zero eigenvalue, cosine %.9f, a_gap %.4f, %.0fs",
                    p.bvp_residual, p.eigenvector_cosine, p.a_gap, wall)};
}

Outcome c2_isochron_gradient() {
  const auto t0 = Clock::now();
  const PulseSolution& p = fixtures::pulse();
  const IsochronMap& plain = fixtures::isochron();
  IsochronOptions opts;
  opts.extrapolate = true;
  const IsochronMap pi(p, fixtures::fhn(), opts);
  std::mt19937_64 rng(2024);
  const double centre = pulse_centre(p);
  const double eps = 1e-3;
  double worst = 0.0, worst_plain = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const FieldState v = smooth_direction(p.grid(), centre, rng);
    const FieldState up = p.profile + eps * v, um = p.profile - eps * v;
    const double fd = (pi(up) - pi(um)) / (2 * eps);
    const double fd_plain = (plain(up) - plain(um)) / (2 * eps);
    const double exact = inner(p.adjoint, v);
    const double rel = std::fabs(fd - exact) / std::fabs(exact);
    const double rel_plain = std::fabs(fd_plain - exact) / std::fabs(exact);
    worst = std::max(worst, rel);
    worst_plain = std::max(worst_plain, rel_plain);
    detail(fmt("direction %d: <psi,v>=% .8f fd=% .8f rel=%.2e (single dt: % .8f rel=%.2e)", trial,
               exact, fd, rel, fd_plain, rel_plain));
  }
  const double wall = seconds_since(t0);
  return {worst <= 1e-2 && wall <= 600.0,
          fmt("max relative error %.2e over 10 directions (%.2e without dt extrapolation), %.0fs",
              worst, worst_plain, wall)};
}

Outcome c3_coefficient_oracle() {
  const ModelSpec model = fixtures::fhn(1.0, 0.5);
  const ReducedModel& r = fixtures::reduced_inhomogeneous();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a_scale = series_sup(r.a);
  double b_scale = 0.0;
  for (const auto& b : r.b) b_scale = std::max(b_scale, series_sup(b));
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const double x = u(rng);
    const DirectCoefficients d = direct_coefficients(fixtures::isochron(), model, r.noise, x);
    double err = std::fabs(d.a - r.a(x)) / a_scale;
    std::string line = fmt("x=%.4f a: direct=% .6f trig=% .6f", x, d.a, r.a(x));
    for (int k = -1; k <= 1; ++k) {
      err = std::max(err, std::fabs(d.b[k + 1] - r.b_at(k)(x)) / b_scale);
      line += fmt("  b%+d: % .6f/% .6f", k, d.b[k + 1], r.b_at(k)(x));
    }
    worst = std::max(worst, err);
    detail(line + fmt("  rel=%.2e", err));
  }
  return {worst <= 5e-2, fmt("max relative deviation %.2e at 5 translates", worst)};
}

Outcome c4_structure() {
  bool pass = true;
  std::string out;
  for (const ReducedModel* r : {&fixtures::reduced_inhomogeneous(), &fixtures::reduced_homogeneous()}) {
    const TrigSeries& b0p = r->b_prime_at(0);
    const bool zero = b0p.mean() == 0.0 && b0p.max_harmonic() == 0.0;
    std::vector<const TrigSeries*> all{&r->a, &r->a_prime, &r->strat};
    for (const auto& b : r->b) all.push_back(&b);
    for (const auto& b : r->b_prime) all.push_back(&b);
    double period_err = 0.0;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const TrigSeries* s : all)
      for (int i = 0; i < 50; ++i) {
        const double x = u(rng);
        const double scale = std::max(1.0, series_sup(*s));
        period_err = std::max(period_err, std::fabs((*s)(x + 1.0) - (*s)(x)) / scale);
        period_err = std::max(period_err, std::fabs((*s)(x - 3.0) - (*s)(x)) / scale);
      }
    detail(fmt("%s noise: b0' identically zero=%d, periodicity error %.1e",
               r->noise.homogeneous() ? "homogeneous" : "inhomogeneous", zero, period_err));
    pass = pass && zero && period_err <= 1e-13;
  }
  const ReducedModel& h = fixtures::reduced_homogeneous();
  const TrigSeries bsum = b_square_sum(h);
  const double a_rel = series_variation(h.a) / std::fabs(h.a.mean());
  const double b_rel = series_variation(bsum) / std::fabs(bsum.mean());
  detail(fmt("homogeneous: a variation/mean=%.2e (mean %.6f), sum b^2 variation/mean=%.2e (mean %.6f)",
             a_rel, h.a.mean(), b_rel, bsum.mean()));
  pass = pass && a_rel <= 1e-10 && b_rel <= 1e-10;
  return {pass, fmt("b0'=0 exactly, periodic, homogeneous a and sum b^2 constant to %.1e",
                    std::max(a_rel, b_rel))};
}

Outcome c5_lyapunov() {
  const ReducedModel& r = fixtures::reduced_inhomogeneous();
  const auto t0 = Clock::now();
  const double sigma = 0.1;
  const StationaryDensity d = stationary_density(r, sigma);
  const LyapunovAnalytic an = lyapunov_analytic(r, sigma, d);
  const double rel = std::fabs(an.lambda_a - an.lambda_b) / std::fabs(an.lambda_b);
  const double dt = default_dt(r, sigma, 1e-3);
  const double duration = 1e4 / (sigma * sigma);
  const double burn_in = 1e2 / (sigma * sigma);
  const LyapunovEstimate mc =
      tangent_lyapunov_mc(r, sigma, 0.0, NoisePath(11, r.noise.K, dt), duration, burn_in, 50);
  const double z = (mc.lambda - an.lambda_b) / mc.stderr_;
  const double wall = seconds_since(t0);
  detail(fmt("sigma=0.1 dt=%.1e T=%.0f: lambda_A=%.6e lambda_B=%.6e rel=%.1e", dt, duration,
             an.lambda_a, an.lambda_b, rel));
  detail(fmt("Monte Carlo lambda=%.6e +- %.2e (z=%.2f), runtime %.0fs", mc.lambda, mc.stderr_, z, wall));
  const bool pass = rel <= 1e-6 && std::fabs(z) <= 3.0 && an.lambda_a < 0.0 && an.lambda_b < 0.0 &&
                    mc.lambda < 0.0 && wall <= 300.0;
  return {pass, fmt("lambda_A/lambda_B agree to %.1e, MC z=%.2f, all negative, %.0fs", rel, z, wall)};
}

Outcome c6_density() {
  bool pass = true;
  std::string summary;
  for (double sigma : {0.1, 1.0}) {
    const StationaryDensity d = stationary_density(fixtures::reduced_inhomogeneous(), sigma);
    const double pmin = *std::min_element(d.p.begin(), d.p.end());
    const double pmax = *std::max_element(d.p.begin(), d.p.end());
    detail(fmt("inhomogeneous sigma=%.1f: p in [%.6f, %.6f], |int p - 1|=%.1e, residual=%.1e", sigma,
               pmin, pmax, std::fabs(d.integral - 1.0), d.residual));
    pass = pass && pmin > 0.0 && std::fabs(d.integral - 1.0) <= 1e-12 && d.residual <= 1e-8;
  }
  const StationaryDensity h = stationary_density(fixtures::reduced_homogeneous(), 0.1);
  double dev = 0.0;
  for (double p : h.p) dev = std::max(dev, std::fabs(p - 1.0));
  detail(fmt("homogeneous sigma=0.1: max |p - 1| = %.1e", dev));
  pass = pass && dev <= 1e-8;
  return {pass, fmt("positive, normalised, residual below 1e-8; homogeneous |p-1| = %.1e", dev)};
}

Outcome c7_time_change() {
  // Zero speed: the rescaled path reproduces the sigma-model at matching steps.
  ReducedModel r0 = fixtures::reduced_inhomogeneous();
  r0.speed = 0.0;
  const double sigma = 0.1;
  const NoisePath path(21, r0.noise.K, 1e-3);
  SimulationOptions opt;
  opt.stride = 1000;
  TorusEnsemble a({0.0, 0.3, 0.7}), b({0.0, 0.3, 0.7});
  const Trajectory ta = simulate(r0, sigma, a, path, 2e3, opt);
  const Trajectory tb = simulate(r0, 1.0, b, rescale_noise(path, 0.0, sigma), 2e3 * sigma * sigma, opt);
  double exact_err = 0.0;
  for (std::size_t i = 0; i < ta.lifts.size(); ++i)
    for (std::size_t m = 0; m < 3; ++m)
      exact_err = std::max(exact_err, std::fabs(ta.lifts[i][m] - tb.lifts[i][m]));
  detail(fmt("c=0, sigma=0.1, 2e6 steps: max |gamma - gamma~| = %.1e", exact_err));

  // Nonzero speed, homogeneous noise: discrepancy of gamma - c t to the
  // c-free model driven by rotated noise, as dt is halved on one fine path.
  const ReducedModel& r = fixtures::reduced_homogeneous();
  ReducedModel free = r;
  free.speed = 0.0;
  const double s2 = 0.5, horizon = 20.0;
  const NoisePath fine(22, r.noise.K, std::ldexp(1.0, -14));
  const NoisePath rotated = rescale_noise(fine, r.speed, s2);
  std::vector<double> dts, errs;
  for (int level = 6; level >= 3; --level) {
    const NoisePath p = fine.coarsened(level);
    const NoisePath q = rotated.coarsened(level);
    SimulationOptions o;
    o.stride = std::lround(0.25 / p.dt());
    TorusEnsemble e1({0.0, 0.4}), e2({0.0, 0.4});
    const Trajectory t1 = simulate(r, s2, e1, p, horizon, o);
    const Trajectory t2 = simulate(free, 1.0, e2, q, horizon * s2 * s2, o);
    double err = 0.0;
    for (std::size_t i = 0; i < t1.lifts.size(); ++i)
      for (std::size_t m = 0; m < 2; ++m)
        err = std::max(err, std::fabs(t1.lifts[i][m] - r.speed * t1.times[i] - t2.lifts[i][m]));
    dts.push_back(std::log(p.dt()));
    errs.push_back(std::log(err));
    detail(fmt("c=%.4f sigma=%.1f dt=2^-%d: max discrepancy %.3e", r.speed, s2, 14 - level, err));
  }
  const double order = stats::linear_fit(dts, errs).slope;
  detail(fmt("fitted order %.2f", order));
  return {exact_err <= 1e-10 && order >= 0.5,
          fmt("c=0 identity to %.1e; c!=0 discrepancy order %.2f", exact_err, order)};
}

long g_order_violations = 0;

Outcome c8_scaling() {
  const ReducedModel& r = fixtures::reduced_homogeneous();
  const auto t0 = Clock::now();
  ScanOptions o;
  o.seed = 1000;
  const ScanResult scan = sync_scaling_scan(r, {0.2, 0.14, 0.1, 0.07, 0.05}, 200, o);
  bool reliable = true;
  for (const auto& row : scan.rows) {
    detail(fmt("sigma=%.2f dt=%.1e median=%.1f censored=%d/%d%s", row.sigma, row.dt,
               row.median_time, row.censored, row.reps, row.unreliable ? " (unreliable)" : ""));
    reliable = reliable && !row.unreliable;
    g_order_violations += row.order_violations;
  }
  const double wall = seconds_since(t0);
  detail(fmt("slope %.3f, runtime %.0fs", scan.slope, wall));
  return {reliable && scan.slope >= -2.3 && scan.slope <= -1.7 && wall <= 1800.0,
          fmt("slope %.3f over 5 sigmas x 200 reps, %.0fs", scan.slope, wall)};
}

Outcome c9_exactness() {
  const ReducedModel r = fixtures::synthetic_reduced(0.0);
  // Cocycle: splitting a run at arbitrary step boundaries changes nothing.
  bool cocycle = true;
  const NoisePath path(31, r.noise.K, 1e-3);
  for (Scheme s : {Scheme::ito_euler, Scheme::stratonovich_heun}) {
    SimulationOptions o;
    o.scheme = s;
    o.stride = 0;
    TorusEnsemble whole({0.1, 0.5, 0.9});
    simulate(r, 1.0, whole, path, 10.0, o);
    TorusEnsemble parts({0.1, 0.5, 0.9});
    long done = 0;
    for (long chunk : {1234L, 4321L, 4445L}) {
      simulate(r, 1.0, parts, path.shifted(done), chunk * 1e-3, o);
      done += chunk;
    }
    cocycle = cocycle && whole.lifts == parts.lifts;
  }
  detail(fmt("cocycle bit-exact: %d", cocycle));

  // Order preservation over two-point runs.
  long violations = g_order_violations;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto res = sync_time(r, 1.0, 0.0, 0.3, 1e-2, NoisePath(seed, r.noise.K, 1e-3), 1e3);
    violations += res.order_violations;
  }
  detail(fmt("order violations over all two-point runs: %ld", violations));

  // Ito against Stratonovich stationary histograms as dt is halved.
  const double sigma = 1.0, horizon = 4e4, dt0 = 0.02;
  std::vector<double> ks, logdt;
  for (int level = 3; level >= 0; --level) {
    std::vector<double> xs[2];
    double dt = 0.0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      const NoisePath p = NoisePath(seed, r.noise.K, dt0 / 8).coarsened(level);
      dt = p.dt();
      for (int s = 0; s < 2; ++s) {
        SimulationOptions o;
        o.scheme = s ? Scheme::stratonovich_heun : Scheme::ito_euler;
        o.stride = std::lround(0.05 / dt);
        TorusEnsemble e({0.0});
        const Trajectory t = simulate(r, sigma, e, p, horizon, o);
        for (const auto& l : t.lifts) xs[s].push_back(wrap(l[0]));
      }
    }
    ks.push_back(std::log(stats::ks_two_sample(xs[0], xs[1]).distance));
    logdt.push_back(std::log(dt));
  }
  bool monotone = true;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    detail(fmt("dt=%.5f KS(Ito, Stratonovich)=%.4f", std::exp(logdt[i]), std::exp(ks[i])));
    if (i > 0) monotone = monotone && ks[i] < ks[i - 1];
  }
  const double order = stats::linear_fit(logdt, ks).slope;
  detail(fmt("KS decay order %.2f", order));
  return {cocycle && violations == 0 && monotone && order >= 0.8,
          fmt("cocycle exact, %ld order violations, KS halves per dt-halving (order %.2f)",
              violations, order)};
}

Outcome c10_capstone() {
  const auto t0 = Clock::now();
  const PulseSolution& p = fixtures::pulse();
  const ModelSpec model = fixtures::fhn(0.0, 1.0);
  const NoiseSpec noise(1, {0.8, 0.0, 0.8}, 0.1);
  const double sigma = 0.1, horizon = 50.0 / (sigma * sigma);
  std::vector<double> finals, ratios;
  double max_tube = 0.0;
  int censored = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const TwoPulseReport r = two_pulse_experiment(p, model, noise, sigma, 0.0, 0.3, horizon, seed);
    censored += r.censored;
    finals.push_back(r.censored ? INFINITY : r.final_distance);
    ratios.push_back(r.censored ? INFINITY : r.final_discrepancy / r.initial_discrepancy);
    max_tube = std::max(max_tube, r.max_tube);
    detail(fmt("seed %2d: distance %.2e, discrepancy %.3f -> %.2e, max tube %.3f%s", seed,
               r.final_distance, r.initial_discrepancy, r.final_discrepancy, r.max_tube,
               r.censored ? " (censored)" : ""));
  }
  const double med = stats::median(finals), med_ratio = stats::median(ratios);
  const double wall = seconds_since(t0);
  const bool pass = med < 0.05 && max_tube < 5.0 * sigma && med_ratio <= 0.1 && wall <= 7200.0;
  return {pass, fmt("median distance %.2e, max tube %.3f (< %.1f), median discrepancy ratio %.1e, "
                    "%d censored, %.0fs",
                    med, max_tube, 5.0 * sigma, med_ratio, censored, wall)};
}

Outcome c11_squeeze() {
  double smallest = -1.0;
  for (double gain : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0}) {
    const SqueezeReport r = controlled_squeeze(gain);
    detail(fmt("gain %.2f: holds %d%d%d spreads %.2e %.2e %.2e", gain, r.holds[0], r.holds[1],
               r.holds[2], r.spread[0], r.spread[1], r.spread[2]));
    if (r.all_hold() && smallest < 0.0) smallest = gain;
  }
  const SqueezeReport r = controlled_squeeze(fixtures::reduced_homogeneous(), 0.1, 2.0);
  detail(fmt("gain 2: reversal |gamma(2)-gamma(0)| = %.1e, closed-form error %.1e, "
             "reduced model spans first harmonic: %d",
             r.reversal_error_2, r.closed_form_error, r.nondegenerate));
  return {r.all_hold() && r.reversal_error_2 <= 1e-10 && r.closed_form_error <= 1e-10,
          fmt("inequalities hold from gain %.2f; t=2 reversal error %.1e", smallest,
              r.reversal_error_2)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 pulse pipeline", c1_pulse},
      {"C2 isochron first derivative", c2_isochron_gradient},
      {"C3 coefficient oracle", c3_coefficient_oracle},
      {"C4 structural identities", c4_structure},
      {"C5 Lyapunov triple agreement", c5_lyapunov},
      {"C6 stationary density", c6_density},
      {"C7 time-change identity", c7_time_change},
      {"C8 synchronization scaling", c8_scaling},
      {"C9 reduced SDE exactness", c9_exactness},
      {"C10 SPDE capstone", c10_capstone},
      {"C11 squeeze demo", c11_squeeze},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!wanted.empty() && !wanted.count(static_cast<int>(i + 1))) continue;
    const auto& [name, fn] = criteria[i];
    std::printf("%s\n", name.c_str());
    std::fflush(stdout);
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.summary.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
