#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pulsesync/grid.hpp"

namespace pulsesync {

using Complex = std::complex<double>;

namespace detail {
struct FftPlans;
}

/// Real-to-complex Fourier transforms on a periodic grid. Plans are created
/// once per point count with FFTW_ESTIMATE, so transforms are deterministic.
/// Instances are cheap to copy and safe to use from several threads.
class Spectral1D {
 public:
  explicit Spectral1D(const Grid1D& grid);

  const Grid1D& grid() const noexcept { return grid_; }
  int points() const noexcept { return grid_.points(); }
  int modes() const noexcept { return grid_.points() / 2 + 1; }
  /// Angular wavenumber 2 pi q / L of half-spectrum index q.
  double wavenumber(int q) const noexcept { return wavenumbers_[q]; }

  /// Unnormalised forward transform, out has modes() entries.
  void forward(std::span<const double> in, std::span<Complex> out) const;
  /// Inverse transform including the 1/N normalisation.
  void inverse(std::span<const Complex> in, std::span<double> out) const;

  /// Spectral derivative of the given order (1 or 2).
  void derivative(std::span<const double> f, std::span<double> out, int order) const;
  /// out(y) = f(y - shift) for the band-limited interpolant of f.
  void translate(std::span<const double> f, double shift, std::span<double> out) const;

  /// Dense matrix of the spectral derivative of the given order.
  Eigen::MatrixXd derivative_matrix(int order) const;

 private:
  Grid1D grid_;
  std::shared_ptr<const detail::FftPlans> plans_;
  std::vector<double> wavenumbers_;
};

/// Component-wise translation T_x f = f(. - x).
FieldState translate(const FieldState& f, double shift);
/// Component-wise spectral derivative.
FieldState derivative(const FieldState& f);
/// Translation by a whole number of length units; an index roll on
/// commensurate grids, a spectral shift otherwise.
FieldState integer_translate(const FieldState& f, int units);

/// Version string of the FFT library in use.
std::string fft_backend_version();

}  // namespace pulsesync
