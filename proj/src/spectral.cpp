#include "pulsesync/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "pulsesync/errors.hpp"

namespace pulsesync {

namespace detail {

struct FftPlans {
  int n = 0;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit FftPlans(int points) : n(points) {
    std::vector<double> real(points);
    fftw_complex* spec = fftw_alloc_complex(points / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    r2c = fftw_plan_dft_r2c_1d(points, real.data(), spec, flags);
    c2r = fftw_plan_dft_c2r_1d(points, spec, real.data(), flags);
    fftw_free(spec);
    if (!r2c || !c2r) throw NumericalError("FFTW planning failed");
  }
  ~FftPlans() {
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
};

namespace {
std::shared_ptr<const FftPlans> plans_for(int points) {
  // The FFTW planner is not reentrant.
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const FftPlans>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[points];
  if (!slot) slot = std::make_shared<const FftPlans>(points);
  return slot;
}
}  // namespace

}  // namespace detail

Spectral1D::Spectral1D(const Grid1D& grid)
    : grid_(grid), plans_(detail::plans_for(grid.points())) {
  wavenumbers_.resize(modes());
  for (int q = 0; q < modes(); ++q)
    wavenumbers_[q] = 2.0 * std::numbers::pi * q / grid_.length();
}

void Spectral1D::forward(std::span<const double> in, std::span<Complex> out) const {
  // r2c leaves its input untouched
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void Spectral1D::inverse(std::span<const Complex> in, std::span<double> out) const {
  std::vector<Complex> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double scale = 1.0 / points();
  for (double& v : out) v *= scale;
}

void Spectral1D::derivative(std::span<const double> f, std::span<double> out,
                            int order) const {
  std::vector<Complex> spec(modes());
  forward(f, spec);
  const int nyquist = points() / 2;
  for (int q = 0; q < modes(); ++q) {
    const double k = wavenumbers_[q];
    if (order == 1)
      spec[q] *= (q == nyquist) ? Complex(0.0) : Complex(0.0, k);
    else if (order == 2)
      spec[q] *= -k * k;
    else
      throw ValidationError("spectral derivative order must be 1 or 2");
  }
  inverse(spec, out);
}

void Spectral1D::translate(std::span<const double> f, double shift,
                           std::span<double> out) const {
  std::vector<Complex> spec(modes());
  forward(f, spec);
  const int nyquist = points() / 2;
  for (int q = 0; q < modes(); ++q) {
    const double phase = -wavenumbers_[q] * shift;
    if (q == nyquist)
      spec[q] *= std::cos(phase);
    else
      spec[q] *= Complex(std::cos(phase), std::sin(phase));
  }
  inverse(spec, out);
}

Eigen::MatrixXd Spectral1D::derivative_matrix(int order) const {
  const int n = points();
  Eigen::MatrixXd d(n, n);
  std::vector<double> unit(n, 0.0), col(n);
  for (int j = 0; j < n; ++j) {
    unit[j] = 1.0;
    derivative(unit, col, order);
    for (int i = 0; i < n; ++i) d(i, j) = col[i];
    unit[j] = 0.0;
  }
  return d;
}

FieldState translate(const FieldState& f, double shift) {
  const Spectral1D spectral(f.grid());
  FieldState out(f.grid(), f.components(), f.time());
  for (int c = 0; c < f.components(); ++c)
    spectral.translate(f.component(c), shift, out.component(c));
  return out;
}

FieldState derivative(const FieldState& f) {
  const Spectral1D spectral(f.grid());
  FieldState out(f.grid(), f.components(), f.time());
  for (int c = 0; c < f.components(); ++c)
    spectral.derivative(f.component(c), out.component(c), 1);
  return out;
}

FieldState integer_translate(const FieldState& f, int units) {
  const Grid1D& g = f.grid();
  if (!g.commensurate()) return translate(f, static_cast<double>(units));
  const int n = g.points();
  const int roll = ((units % g.length()) * g.points_per_unit() % n + n) % n;
  FieldState out(g, f.components(), f.time());
  for (int c = 0; c < f.components(); ++c) {
    auto src = f.component(c);
    auto dst = out.component(c);
    for (int i = 0; i < n; ++i) dst[(i + roll) % n] = src[i];
  }
  return out;
}

std::string fft_backend_version() { return fftw_version; }

}  // namespace pulsesync
