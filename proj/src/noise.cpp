#include "pulsesync/noise.hpp"

#include <cmath>
#include <numbers>

#include "pulsesync/errors.hpp"

namespace pulsesync {

NoiseSpec::NoiseSpec(int truncation, std::vector<double> coefficients, double amplitude)
    : K(truncation), alpha(std::move(coefficients)), sigma(amplitude) {
  validate();
}

bool NoiseSpec::homogeneous() const {
  for (int k = 1; k <= K; ++k)
    if (alpha_at(k) != alpha_at(-k)) return false;
  return true;
}

std::vector<int> NoiseSpec::active_modes() const {
  std::vector<int> out;
  for (int k = -K; k <= K; ++k)
    if (alpha_at(k) != 0.0) out.push_back(k);
  return out;
}

void NoiseSpec::validate() const {
  if (K < 1) throw ValidationError("noise truncation K must be at least 1");
  if (alpha.size() != static_cast<std::size_t>(2 * K + 1))
    throw ValidationError("noise table needs 2K+1 coefficients alpha_{-K..K}");
  for (double a : alpha)
    if (!std::isfinite(a)) throw ValidationError("noise coefficients must be finite");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw ValidationError("noise amplitude sigma must be finite and nonnegative");
}

double basis(int k, double x) {
  if (k == 0) return 1.0;
  const double th = 2.0 * std::numbers::pi * std::abs(k) * x;
  return std::numbers::sqrt2 * (k > 0 ? std::cos(th) : std::sin(th));
}

std::vector<double> basis_samples(const Grid1D& grid, int k) {
  std::vector<double> out(grid.points());
  // Reduce the argument to one period first so that samples repeat exactly
  // on every unit cell of a commensurate grid.
  const int per = grid.commensurate() ? grid.points_per_unit() : 0;
  for (int i = 0; i < grid.points(); ++i) {
    const double x = per ? static_cast<double>(i % per) / per : grid.coordinate(i);
    out[i] = basis(k, x);
  }
  return out;
}

}  // namespace pulsesync
