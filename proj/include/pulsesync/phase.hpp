#pragma once

#include <vector>

#include "pulsesync/pulse.hpp"
#include "pulsesync/spectral.hpp"

namespace pulsesync {

struct PhaseFit {
  double phase = 0.0;          // in [0, L)
  double tube_distance = 0.0;  // ||w - T_phase u*||
  double correlation = 0.0;    // <w, T_phase u*>
  double curvature = 0.0;      // -C''(phase) / ||u*'||^2, 1 for an exact translate
  int newton_iterations = 0;
  bool parabolic_fallback = false;
};

/// Nearest translate of a pulse profile by maximising C(x) = <w, T_x u*>.
/// The grid maximum comes from one FFT cross-correlation, the sub-grid
/// refinement from Newton on C' with analytic Fourier sums.
class PhaseFitter {
 public:
  explicit PhaseFitter(const FieldState& profile, double min_curvature = 0.25);

  const Grid1D& grid() const noexcept { return spectral_.grid(); }
  const FieldState& profile() const noexcept { return profile_; }

  /// Throws OffManifoldError when the correlation peak is non-positive or
  /// flatter than min_curvature.
  PhaseFit fit(const FieldState& w) const;

 private:
  struct Derivs {
    double value, first, second;
  };
  Derivs correlation_at(const std::vector<Complex>& z, double x) const;

  FieldState profile_;
  Spectral1D spectral_;
  std::vector<std::vector<Complex>> profile_hat_;
  double slope_norm2_ = 0.0;
  double min_curvature_;
};

PhaseFit phase_fit(const FieldState& w, const PulseSolution& pulse);

/// Index roll by a whole number of grid cells: out_i = f_{i - cells}.
FieldState roll(const FieldState& f, int cells);

}  // namespace pulsesync
