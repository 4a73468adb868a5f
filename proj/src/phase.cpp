#include "pulsesync/phase.hpp"

#include <algorithm>
#include <cmath>

#include "pulsesync/errors.hpp"

namespace pulsesync {

PhaseFitter::PhaseFitter(const FieldState& profile, double min_curvature)
    : profile_(profile), spectral_(profile.grid()), min_curvature_(min_curvature) {
  profile_hat_.resize(profile.components());
  for (int c = 0; c < profile.components(); ++c) {
    profile_hat_[c].resize(spectral_.modes());
    spectral_.forward(profile.component(c), profile_hat_[c]);
  }
  const FieldState slope = derivative(profile);
  slope_norm2_ = inner(slope, slope);
  if (!(slope_norm2_ > 0.0)) throw ValidationError("phase fitting needs a non-constant profile");
}

PhaseFitter::Derivs PhaseFitter::correlation_at(const std::vector<Complex>& z, double x) const {
  // C(x) = (h / N) sum over the full spectrum of Z_q exp(i k_q x).
  const int nyquist = spectral_.points() / 2;
  const double scale = grid().spacing() / spectral_.points();
  Derivs d{z[0].real(), 0.0, 0.0};
  for (int q = 1; q < nyquist; ++q) {
    const double k = spectral_.wavenumber(q);
    const Complex e = z[q] * Complex(std::cos(k * x), std::sin(k * x));
    d.value += 2.0 * e.real();
    d.first -= 2.0 * k * e.imag();
    d.second -= 2.0 * k * k * e.real();
  }
  const double k = spectral_.wavenumber(nyquist);
  const double zn = z[nyquist].real();
  d.value += zn * std::cos(k * x);
  d.first -= zn * k * std::sin(k * x);
  d.second -= zn * k * k * std::cos(k * x);
  d.value *= scale;
  d.first *= scale;
  d.second *= scale;
  return d;
}

PhaseFit PhaseFitter::fit(const FieldState& w) const {
  if (!w.same_shape(profile_)) throw ValidationError("phase fit: field and pulse grids differ");
  const int modes = spectral_.modes();
  const int n = spectral_.points();
  const double h = grid().spacing();
  const double len = grid().length();

  std::vector<Complex> z(modes, Complex(0.0)), w_hat(modes);
  for (int c = 0; c < w.components(); ++c) {
    spectral_.forward(w.component(c), w_hat);
    for (int q = 0; q < modes; ++q) z[q] += w_hat[q] * std::conj(profile_hat_[c][q]);
  }
  std::vector<double> corr(n);
  spectral_.inverse(z, corr);
  const int best = static_cast<int>(std::max_element(corr.begin(), corr.end()) - corr.begin());
  if (!(corr[best] * h > 0.0))
    throw OffManifoldError("phase fit: no positive correlation with the pulse profile");

  PhaseFit out;
  const double x0 = best * h;
  double x = x0;
  Derivs d = correlation_at(z, x);
  bool ok = false;
  double last_step = h;
  for (int it = 0; it < 20; ++it) {
    out.newton_iterations = it + 1;
    if (!(d.second < 0.0)) break;
    const double step = d.first / d.second;
    x -= step;
    if (std::fabs(x - x0) > h) break;
    d = correlation_at(z, x);
    last_step = std::fabs(step);
    if (last_step <= 1e-13 * h) break;
  }
  // Round-off can keep the last step above the target; accept anything
  // that has clearly converged inside the bracket.
  ok = std::fabs(x - x0) <= h && last_step <= 1e-8 * h && d.second < 0.0;
  if (!ok) {
    out.parabolic_fallback = true;
    const double cm = corr[(best + n - 1) % n], c0 = corr[best], cp = corr[(best + 1) % n];
    const double denom = cm - 2.0 * c0 + cp;
    x = x0 + (denom < 0.0 ? 0.5 * h * (cm - cp) / denom : 0.0);
    d = correlation_at(z, x);
  }

  out.correlation = d.value;
  out.curvature = -d.second / slope_norm2_;
  if (!(out.correlation > 0.0) || !(out.curvature >= min_curvature_))
    throw OffManifoldError("phase fit: correlation peak too flat, profile lost (curvature " +
                           std::to_string(out.curvature) + ")");
  out.phase = wrap(x, len);

  FieldState shifted = translate(profile_, out.phase);
  out.tube_distance = norm(w - shifted);
  return out;
}

PhaseFit phase_fit(const FieldState& w, const PulseSolution& pulse) {
  return PhaseFitter(pulse.profile).fit(w);
}

FieldState roll(const FieldState& f, int cells) {
  const int n = f.points();
  const int r = ((cells % n) + n) % n;
  FieldState out(f.grid(), f.components(), f.time());
  for (int c = 0; c < f.components(); ++c) {
    auto src = f.component(c);
    auto dst = out.component(c);
    for (int i = 0; i < n; ++i) dst[(i + r) % n] = src[i];
  }
  return out;
}

}  // namespace pulsesync
