#include "pulsesync/evolve.hpp"

#include <algorithm>
#include <cmath>

#include "pulsesync/errors.hpp"

namespace pulsesync {

EtdStepper::EtdStepper(ModelSpec model, const Grid1D& grid, double dt)
    : model_(std::move(model)),
      spectral_(grid),
      dt_(dt),
      rhs_(grid, model_.components),
      state_hat_(spectral_.modes()),
      rhs_hat_(spectral_.modes()),
      buffer_(grid.points()) {
  model_.validate();
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  propagator_.resize(model_.components);
  integrator_.resize(model_.components);
  for (int c = 0; c < model_.components; ++c) {
    const double d = model_.diffusion[c];
    if (d == 0.0) continue;
    auto& e = propagator_[c];
    auto& p = integrator_[c];
    e.resize(spectral_.modes());
    p.resize(spectral_.modes());
    for (int q = 0; q < spectral_.modes(); ++q) {
      const double k = spectral_.wavenumber(q);
      const double z = d * k * k * dt;
      e[q] = std::exp(-z);
      p[q] = (z == 0.0) ? dt : -std::expm1(-z) / z * dt;
    }
  }
}

void EtdStepper::step(FieldState& u) { step(u, nullptr, nullptr); }

void EtdStepper::step(FieldState& u, const FieldState* extra_drift, const FieldState* kick) {
  model_.reaction(u, rhs_);
  if (extra_drift) rhs_ += *extra_drift;
  const int n = u.points();
  for (int c = 0; c < model_.components; ++c) {
    auto uc = u.component(c);
    auto fc = rhs_.component(c);
    if (model_.diffusion[c] == 0.0) {
      if (kick) {
        auto kc = kick->component(c);
        for (int i = 0; i < n; ++i) uc[i] = (uc[i] + kc[i]) + dt_ * fc[i];
      } else {
        for (int i = 0; i < n; ++i) uc[i] += dt_ * fc[i];
      }
      continue;
    }
    if (kick) {
      auto kc = kick->component(c);
      for (int i = 0; i < n; ++i) buffer_[i] = uc[i] + kc[i];
      spectral_.forward(buffer_, state_hat_);
    } else {
      spectral_.forward(uc, state_hat_);
    }
    spectral_.forward(fc, rhs_hat_);
    const auto& e = propagator_[c];
    const auto& p = integrator_[c];
    for (int q = 0; q < spectral_.modes(); ++q)
      state_hat_[q] = e[q] * state_hat_[q] + p[q] * rhs_hat_[q];
    spectral_.inverse(state_hat_, uc);
  }
  u.set_time(u.time() + dt_);
}

long step_count(double duration, double dt) {
  if (!(dt > 0.0)) throw ValidationError("time step must be positive");
  if (duration < 0.0) throw ValidationError("duration must be nonnegative");
  const double ratio = duration / dt;
  const long n = std::lround(ratio);
  if (std::fabs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
    throw ValidationError("duration must be a whole multiple of the time step");
  return n;
}

FieldState evolve_pde(const FieldState& state, const ModelSpec& model, double duration,
                      double dt) {
  const long steps = step_count(duration, dt);
  if (state.components() != model.components)
    throw ValidationError("state component count does not match the model");
  EtdStepper stepper(model, state.grid(), dt);
  FieldState u = state;
  const double t0 = state.time();
  for (long s = 0; s < steps; ++s) {
    stepper.step(u);
    if (!u.all_finite()) throw BlowUpError(s + 1, u.time());
  }
  // Avoid drift in the time stamp from repeated additions.
  u.set_time(t0 + static_cast<double>(steps) * dt);
  return u;
}

}  // namespace pulsesync
