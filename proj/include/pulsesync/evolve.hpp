#pragma once

#include <vector>

#include "pulsesync/model.hpp"
#include "pulsesync/spectral.hpp"

namespace pulsesync {

/// First-order exponential time differencing on a periodic grid: diffusion is
/// integrated exactly in Fourier space, the reaction explicitly,
///   u_hat <- E u_hat + P f_hat,  E = exp(-D k^2 dt),  P = (1 - E) / (D k^2).
/// Holds scratch buffers, so one stepper per thread.
class EtdStepper {
 public:
  EtdStepper(ModelSpec model, const Grid1D& grid, double dt);

  double dt() const noexcept { return dt_; }
  const ModelSpec& model() const noexcept { return model_; }
  const Grid1D& grid() const noexcept { return spectral_.grid(); }

  /// One deterministic step in place.
  void step(FieldState& u);

  /// One step with an explicit drift added to the reaction and a kick added
  /// to the state before the linear propagator:
  ///   u <- E (u + kick) + P (f(u) + extra_drift).
  /// Either pointer may be null.
  void step(FieldState& u, const FieldState* extra_drift, const FieldState* kick);

 private:
  ModelSpec model_;
  Spectral1D spectral_;
  double dt_;
  std::vector<std::vector<double>> propagator_;  // E per diffusive component
  std::vector<std::vector<double>> integrator_;  // P per diffusive component
  FieldState rhs_;
  std::vector<Complex> state_hat_;
  std::vector<Complex> rhs_hat_;
  std::vector<double> buffer_;
};

/// Deterministic evolution over `duration` (a whole number of steps).
/// Throws BlowUpError naming the step at which the field became non-finite.
FieldState evolve_pde(const FieldState& state, const ModelSpec& model, double duration,
                      double dt);

/// Number of steps of size dt in duration; throws if not a whole multiple.
long step_count(double duration, double dt);

}  // namespace pulsesync
