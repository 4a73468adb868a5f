#pragma once

#include "pulsesync/phase.hpp"
#include "pulsesync/pulse.hpp"

namespace pulsesync {

struct IsochronOptions {
  double t_relax = 300.0;
  double dt = 0.01;
  double checkpoint = 5.0;   // phase is unwrapped between checkpoints
  double delta_tube = -1.0;  // negative: 0.1 ||u*||
  /// Richardson extrapolation 2 pi_{dt/2} - pi_dt, removing the first-order
  /// time-stepping error of the relaxation at three times the cost.
  bool extrapolate = false;
};

/// Numerical isochron map. v is relaxed deterministically for t_relax and the
/// fitted phase, unwrapped continuously, is compared with the relaxed pulse
/// itself, so that pi(u*) = 0 and pi(T_x u*) = x. Comparing against the
/// evolved profile cancels the time-stepping error in the speed.
class IsochronMap {
 public:
  IsochronMap(const PulseSolution& pulse, ModelSpec model, IsochronOptions options = {});

  /// Throws LeftBasinError if any checkpoint leaves the tube.
  double operator()(const FieldState& v) const;

  /// pi''(u*)[v, w] by polarisation of central second differences.
  double second_variation(const FieldState& v, const FieldState& w, double eps = 1e-3) const;

  const IsochronOptions& options() const noexcept { return options_; }
  double delta_tube() const noexcept { return delta_tube_; }
  double reference_phase() const noexcept { return reference_; }
  const FieldState& profile() const noexcept { return fitter_.profile(); }

 private:
  double relaxed_lift(const FieldState& v, double dt) const;

  ModelSpec model_;
  PhaseFitter fitter_;
  IsochronOptions options_;
  double delta_tube_;
  double reference_ = 0.0;
  double reference_half_ = 0.0;
};

double isochron_map(const FieldState& v, const PulseSolution& pulse, const ModelSpec& model,
                    double t_relax);

double second_variation(const PulseSolution& pulse, const ModelSpec& model, const FieldState& v,
                        const FieldState& w, double eps = 1e-3);

}  // namespace pulsesync
