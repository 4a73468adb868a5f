#pragma once

#include <array>
#include <vector>

#include "pulsesync/reduction.hpp"

namespace pulsesync {

struct SqueezeOptions {
  std::array<double, 3> targets{0.0, 1.0 / 3.0, -1.0 / 3.0};
  double epsilon = 0.05;
  int steps_per_unit = 2000;  // RK4 steps per unit time
  int record_stride = 20;
  std::vector<double> extra_points;  // further initial points to track
};

struct SqueezeReport {
  double gain = 0.0;
  std::vector<double> initial;             // z1, z2, z3, then extra points
  std::vector<double> times;
  std::vector<std::vector<double>> paths;  // [record][point]
  /// Spreads of the three squeezes at t = 1, 3, 5 (in units of the torus):
  ///   gamma^{z2}(1) - gamma^{z3}(1),  gamma^{z3}(3) + 1 - gamma^{z1}(3),
  ///   gamma^{z1}(5) - gamma^{z2}(5) + 1.
  std::array<double, 3> spread{};
  std::array<double, 3> worst_offset{};  // max distance of the pair from its target
  std::array<bool, 3> holds{};
  double reversal_error_2 = 0.0;  // max |gamma(2) - gamma(0)|
  double reversal_error_4 = 0.0;  // max |gamma(4) - gamma(0)|
  double closed_form_error = 0.0;  // against tan(pi (gamma - z)) = tan(pi (x - z)) e^{-2 pi L int k}
  bool nondegenerate = true;       // b_{+1}, b_{-1} span the first harmonic
  bool all_hold() const { return holds[0] && holds[1] && holds[2]; }
};

/// Control schedule k(t) on [0, 5]: +1, -1, +1, -1, +1 on consecutive unit intervals.
double squeeze_gain_sign(double t);
/// Target eta(t) / (2 pi): z1 on [0, 2), z2 on [2, 4), z3 on [4, 5].
double squeeze_target(double t, const std::array<double, 3>& targets);

/// Controlled phase ODE d gamma/dt = -k(t) L sin(2 pi gamma - eta(t)), eta = 2 pi z,
/// integrated by RK4 from z1, z2, z3 (and extra points) over [0, 5].
SqueezeReport controlled_squeeze(double gain, const SqueezeOptions& options = {});

/// As above; the reduced model is checked for the first-harmonic span that
/// makes the control realisable (reported, not enforced).
SqueezeReport controlled_squeeze(const ReducedModel& reduced, double sigma, double gain,
                                 const SqueezeOptions& options = {});

}  // namespace pulsesync
