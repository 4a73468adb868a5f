#pragma once

#include <vector>

#include "pulsesync/grid.hpp"

namespace pulsesync {

/// Spatially periodic noise W = sum_{|k| <= K} alpha_k e_k beta_k with amplitude sigma.
struct NoiseSpec {
  int K = 1;
  std::vector<double> alpha;  // alpha[k + K]
  double sigma = 0.1;

  NoiseSpec() = default;
  NoiseSpec(int truncation, std::vector<double> coefficients, double amplitude);

  double alpha_at(int k) const { return alpha.at(static_cast<std::size_t>(k + K)); }
  /// alpha_k == alpha_{-k} for every k.
  bool homogeneous() const;
  /// Modes with alpha_k != 0.
  std::vector<int> active_modes() const;
  void validate() const;
};

/// Unit-period orthonormal basis: 1, sqrt2 cos(2 pi k x) for k > 0 and
/// sqrt2 sin(2 pi |k| x) for k < 0.
double basis(int k, double x);
/// e_k sampled on the grid.
std::vector<double> basis_samples(const Grid1D& grid, int k);

}  // namespace pulsesync
