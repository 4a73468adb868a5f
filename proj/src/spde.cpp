#include "pulsesync/spde.hpp"

#include <algorithm>
#include <cmath>

#include "pulsesync/errors.hpp"
#include "pulsesync/spectral.hpp"
#include "pulsesync/torus.hpp"

namespace pulsesync {

SpdeStepper::SpdeStepper(ModelSpec model, NoiseSpec noise, const Grid1D& grid, double dt,
                         double sigma)
    : stepper_(std::move(model), grid, dt), noise_(std::move(noise)), sigma_(sigma),
      weight_(grid.points(), 0.0), shape_(grid, stepper_.model().components),
      jacobian_(grid, stepper_.model().components * stepper_.model().components),
      drift_(grid, stepper_.model().components), kick_(grid, stepper_.model().components) {
  noise_.validate();
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be nonnegative");
  if (!grid.commensurate())
    throw ValidationError("SPDE grid must hold a whole number of cells per noise period");
  if (!stepper_.model().noise_shape || !stepper_.model().noise_jacobian)
    throw ValidationError("model has no noise shape");
  modes_ = noise_.active_modes();
  for (int k : modes_) {
    std::vector<double> e = basis_samples(grid, k);
    const double alpha = noise_.alpha_at(k);
    for (int i = 0; i < grid.points(); ++i) {
      weight_[i] += alpha * alpha * e[i] * e[i];
      e[i] *= alpha;
    }
    basis_.push_back(std::move(e));
  }
}

void SpdeStepper::step(FieldState& u, std::span<const double> increments) {
  if (sigma_ == 0.0 || modes_.empty()) {
    stepper_.step(u);
  } else {
    if (increments.size() != static_cast<std::size_t>(2 * noise_.K + 1))
      throw ValidationError("increment vector does not cover |k| <= K");
    const ModelSpec& m = stepper_.model();
    const int n = u.points();
    const int comps = m.components;
    m.noise_shape(u, shape_);
    m.noise_jacobian(u, jacobian_);
    const double half_s2 = 0.5 * sigma_ * sigma_;
    for (int r = 0; r < comps; ++r) {
      auto dst = drift_.component(r);
      std::fill(dst.begin(), dst.end(), 0.0);
      for (int c = 0; c < comps; ++c) {
        auto j = jacobian_.component(r * comps + c);
        auto gc = shape_.component(c);
        for (int i = 0; i < n; ++i) dst[i] += j[i] * gc[i];
      }
      for (int i = 0; i < n; ++i) dst[i] *= half_s2 * weight_[i];
    }
    // Noise profile sum_k alpha_k e_k d beta_k, shared by all components.
    auto w = kick_.component(0);
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t m_i = 0; m_i < modes_.size(); ++m_i) {
      const double db = sigma_ * increments[static_cast<std::size_t>(modes_[m_i] + noise_.K)];
      const auto& e = basis_[m_i];
      for (int i = 0; i < n; ++i) w[i] += e[i] * db;
    }
    for (int r = comps - 1; r >= 0; --r) {
      auto gr = shape_.component(r);
      auto dst = kick_.component(r);
      for (int i = 0; i < n; ++i) dst[i] = gr[i] * w[i];
    }
    stepper_.step(u, &drift_, &kick_);
  }
  if (!u.all_finite())
    throw BlowUpError(std::lround(u.time() / stepper_.dt()), u.time());
}

FieldState spde_step(const FieldState& state, const ModelSpec& model, const NoiseSpec& noise,
                     double sigma, std::span<const double> increments, double dt) {
  SpdeStepper stepper(model, noise, state.grid(), dt, sigma);
  FieldState u = state;
  stepper.step(u, increments);
  return u;
}

FieldState place_pulse(const FieldState& profile, double x) {
  const double whole = std::floor(x);
  FieldState out = x == whole ? profile : translate(profile, x - whole);
  return integer_translate(out, static_cast<int>(whole));
}

double shift_discrepancy(const FieldState& u, const FieldState& v) {
  if (!u.same_shape(v)) throw ValidationError("discrepancy: fields differ in shape");
  double best = std::numeric_limits<double>::infinity();
  for (int n = 0; n < u.grid().length(); ++n)
    best = std::min(best, norm(integer_translate(u, -n) - v));
  return best;
}

namespace {

double default_checkpoint(double sigma, const SpdeOptions& o) {
  if (o.checkpoint > 0.0) return o.checkpoint;
  return sigma > 0.0 ? 0.01 / (sigma * sigma) : 1.0;
}

/// Continuous lift of a fitted phase given the previous lift.
double unwrap(double fitted, double previous, double length) {
  double jump = fitted - wrap(previous, length);
  jump -= length * std::round(jump / length);
  return previous + jump;
}

/// Checkpoint every `stride` steps up to `total`; the last interval may be short.
struct Schedule {
  long total, stride;
  Schedule(double horizon, double checkpoint, double dt)
      : total(step_count(horizon, dt)),
        stride(std::max(1L, std::lround(checkpoint / dt))) {}
};

}  // namespace

TwoPulseReport two_pulse_experiment(const PulseSolution& pulse, const ModelSpec& model,
                                    const NoiseSpec& noise, double sigma, double x0, double y0,
                                    double horizon, std::uint64_t seed,
                                    const SpdeOptions& o) {
  const Grid1D& grid = pulse.profile.grid();
  const double len = grid.length();
  SpdeStepper stepper(model, noise, grid, o.dt, sigma);
  const PhaseFitter fitter(pulse.profile);
  const NoisePath path(seed, noise.K, o.dt);
  const Schedule sched(horizon, default_checkpoint(sigma, o), o.dt);

  FieldState u = place_pulse(pulse.profile, x0);
  FieldState v = place_pulse(pulse.profile, y0);
  double lift_u = x0, lift_v = y0;
  std::vector<double> inc(static_cast<std::size_t>(2 * noise.K + 1));
  TwoPulseReport r;

  auto record = [&](double t) {
    const PhaseFit fu = fitter.fit(u), fv = fitter.fit(v);
    lift_u = unwrap(fu.phase, lift_u, len);
    lift_v = unwrap(fv.phase, lift_v, len);
    SpdeCheckpoint cp;
    cp.t = t;
    cp.phase_u = lift_u;
    cp.phase_v = lift_v;
    cp.tube_u = fu.tube_distance;
    cp.tube_v = fv.tube_distance;
    cp.distance = torus_distance(lift_u, lift_v);
    cp.discrepancy = shift_discrepancy(u, v);
    r.max_tube = std::max({r.max_tube, cp.tube_u, cp.tube_v});
    r.checkpoints.push_back(cp);
  };

  long step = 0;
  try {
    record(0.0);
    while (step < sched.total) {
      const long stop = std::min(sched.total, step + sched.stride);
      for (; step < stop; ++step) {
        path.increments(step, inc);
        stepper.step(u, inc);
        stepper.step(v, inc);
      }
      record(static_cast<double>(step) * o.dt);
    }
  } catch (const BlowUpError& e) {
    r.censored = true;
    r.censor_reason = e.what();
    r.censor_time = e.time();
  } catch (const OffManifoldError& e) {
    r.censored = true;
    r.censor_reason = e.what();
    r.censor_time = static_cast<double>(step) * o.dt;
  }
  if (!r.checkpoints.empty()) {
    r.initial_discrepancy = r.checkpoints.front().discrepancy;
    r.final_discrepancy = r.checkpoints.back().discrepancy;
    r.final_distance = r.checkpoints.back().distance;
  }
  return r;
}

double discrete_speed(const PulseSolution& pulse, const ModelSpec& model, double dt,
                      double duration) {
  const PhaseFitter fitter(pulse.profile);
  const double len = pulse.profile.grid().length();
  EtdStepper stepper(model, pulse.profile.grid(), dt);
  const long total = step_count(duration, dt);
  const long stride = std::max(1L, std::lround(1.0 / dt));
  // The first half absorbs the relaxation of the BVP profile to the scheme's own.
  FieldState u = pulse.profile;
  double lift = 0.0, half = 0.0;
  long half_step = 0;
  for (long s = 0; s < total;) {
    const long stop = std::min(total, s + stride);
    for (; s < stop; ++s) stepper.step(u);
    lift = unwrap(fitter.fit(u).phase, lift, len);
    if (half_step == 0 && 2 * s >= total) {
      half = lift;
      half_step = s;
    }
  }
  return (lift - half) / (static_cast<double>(total - half_step) * dt);
}

ComparisonReport reduced_vs_full(const PulseSolution& pulse, const ReducedModel& reduced,
                                 const ModelSpec& model, double sigma, double x0, double horizon,
                                 std::uint64_t seed, const SpdeOptions& o) {
  const Grid1D& grid = pulse.profile.grid();
  const double len = grid.length();
  const NoiseSpec& noise = reduced.noise;
  if (o.reduced_refine < 0 || o.reduced_refine > 20)
    throw ValidationError("reduced_refine must lie in [0, 20]");
  SpdeStepper stepper(model, noise, grid, o.dt, sigma);
  const PhaseFitter fitter(pulse.profile);
  const NoisePath fine(seed, noise.K, o.dt / static_cast<double>(1L << o.reduced_refine));
  const NoisePath coarse = fine.coarsened(o.reduced_refine);
  const Schedule sched(horizon, default_checkpoint(sigma, o), o.dt);

  ComparisonReport r;
  r.discrete_speed = discrete_speed(pulse, model, o.dt);
  ReducedModel shifted = reduced;
  shifted.speed = r.discrete_speed;

  FieldState u = place_pulse(pulse.profile, x0);
  double lift = x0;
  TorusEnsemble gamma({x0});
  std::vector<double> inc(static_cast<std::size_t>(2 * noise.K + 1));
  SimulationOptions sim;
  sim.stride = 0;
  const double tube_limit = o.tube_factor * sigma;

  auto record = [&](double t) {
    const PhaseFit f = fitter.fit(u);
    lift = unwrap(f.phase, lift, len);
    SpdeCheckpoint cp;
    cp.t = t;
    cp.phase_u = lift;
    cp.tube_u = f.tube_distance;
    cp.gamma = gamma.lifts[0];
    r.max_phase_error = std::max(r.max_phase_error, std::fabs(cp.phase_u - cp.gamma));
    if (sigma > 0.0 && cp.tube_u > tube_limit && !std::isfinite(r.first_tube_exit)) r.first_tube_exit = t;
    r.checkpoints.push_back(cp);
  };

  long step = 0;
  try {
    record(0.0);
    while (step < sched.total) {
      const long stop = std::min(sched.total, step + sched.stride);
      const long start = step;
      for (; step < stop; ++step) {
        coarse.increments(step, inc);
        stepper.step(u, inc);
      }
      const long fine_start = start << o.reduced_refine;
      simulate(shifted, sigma, gamma, fine.shifted(fine_start),
               static_cast<double>(stop - start) * o.dt, sim);
      record(static_cast<double>(step) * o.dt);
    }
  } catch (const BlowUpError& e) {
    r.censored = true;
    r.censor_reason = e.what();
  } catch (const OffManifoldError& e) {
    r.censored = true;
    r.censor_reason = e.what();
  }
  return r;
}

}  // namespace pulsesync
