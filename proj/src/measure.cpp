#include "pulsesync/measure.hpp"

#include <algorithm>
#include <cmath>

#include "pulsesync/errors.hpp"
#include "pulsesync/linalg.hpp"
#include "pulsesync/spectral.hpp"

namespace pulsesync {

namespace {

struct Collocation {
  Grid1D grid;
  Spectral1D spectral;
  Eigen::MatrixXd d1, d2;
  std::vector<double> x;

  explicit Collocation(int n)
      : grid(1, n), spectral(grid), d1(spectral.derivative_matrix(1)),
        d2(spectral.derivative_matrix(2)), x(n) {
    for (int i = 0; i < n; ++i) x[i] = grid.coordinate(i);
  }
};

Eigen::VectorXd sample(const TrigSeries& s, const std::vector<double>& x) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = s(x[i]);
  return v;
}

/// drift = c + sigma^2 a, diffusion = sigma^2 B (so the generator has
/// drift d/dx + diffusion/2 d^2/dx^2).
std::pair<TrigSeries, TrigSeries> generator_series(const ReducedModel& r, double sigma) {
  TrigSeries drift = (sigma * sigma) * r.a;
  drift.mean() += r.speed;
  TrigSeries diffusion = (sigma * sigma) * b_square_sum(r);
  return {drift, diffusion};
}

void check_grid(int n) {
  if (n < 8 || (n & (n - 1)) != 0)
    throw ValidationError("Fokker-Planck grid size must be a power of two >= 8");
}

}  // namespace

StationaryDensity stationary_density(const TrigSeries& drift, const TrigSeries& diffusion,
                                     int n_fp) {
  check_grid(n_fp);
  const Collocation col(n_fp);
  const Eigen::VectorXd b = sample(drift, col.x);
  const Eigen::VectorXd big_b = sample(diffusion, col.x);
  if (big_b.minCoeff() <= 0.0)
    throw DegenerateGeneratorError("diffusion coefficient is not strictly positive");

  const Eigen::MatrixXd op = 0.5 * col.d2 * big_b.asDiagonal() - col.d1 * b.asDiagonal();
  const auto svd = linalg::svd(op);
  const Eigen::Index n = n_fp;
  const double top = svd.values(0);
  const double cut = 1e-10 * top;
  const auto null_dim = (svd.values.array() <= cut).count();
  StationaryDensity out;
  out.second_singular = svd.values(n - 2) / top;
  if (null_dim != 1)
    throw DegenerateGeneratorError("Fokker-Planck operator has a nullspace of dimension " +
                                   std::to_string(null_dim));

  Eigen::VectorXd p = svd.vt.row(n - 1).transpose();
  const double h = col.grid.spacing();
  if (p.sum() < 0.0) p = -p;
  p /= h * p.sum();
  if (p.minCoeff() <= 0.0)
    throw PositivityError("stationary density is not positive; increase the grid size");

  out.x = col.x;
  out.p.assign(p.data(), p.data() + n);
  out.integral = h * p.sum();
  out.residual = std::sqrt(h * (op * p).squaredNorm());

  const Eigen::VectorXd bp = big_b.cwiseProduct(p);
  const Eigen::VectorXd flux = -(0.5 * col.d1 * bp - b.cwiseProduct(p));
  out.flux = flux.mean();
  const double scale = std::max(std::fabs(out.flux), (0.5 * (col.d1 * bp)).cwiseAbs().maxCoeff());
  out.flux_variation = (flux.array() - out.flux).abs().maxCoeff() / std::max(scale, 1e-300);
  return out;
}

StationaryDensity stationary_density(const ReducedModel& reduced, double sigma, int n_fp) {
  if (!(sigma > 0.0)) throw ValidationError("stationary density needs sigma > 0");
  const auto [drift, diffusion] = generator_series(reduced, sigma);
  return stationary_density(drift, diffusion, n_fp);
}

LyapunovAnalytic lyapunov_analytic(const ReducedModel& r, double sigma,
                                   const StationaryDensity& density) {
  const int n = static_cast<int>(density.p.size());
  check_grid(n);
  const Grid1D grid(1, n);
  const Spectral1D spectral(grid);
  const double h = grid.spacing();
  const double s2 = sigma * sigma;

  LyapunovAnalytic out;
  std::vector<double> bp(n), dbp(n);
  double integrand_a = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = density.x[i];
    double bp2 = 0.0;
    for (const auto& b : r.b_prime) bp2 += b(x) * b(x);
    integrand_a += (r.a_prime(x) - 0.5 * bp2) * density.p[i];
  }
  out.lambda_a = s2 * h * integrand_a;

  double sum_b = 0.0;
  for (const auto& b : r.b) {
    if (b.mean() == 0.0 && b.max_harmonic() == 0.0) continue;
    for (int i = 0; i < n; ++i) bp[i] = b(density.x[i]) * density.p[i];
    spectral.derivative(bp, dbp, 1);
    for (int i = 0; i < n; ++i) sum_b += dbp[i] * dbp[i] / density.p[i];
  }
  out.lambda_b = -0.5 * s2 * h * sum_b;
  out.difference = out.lambda_a - out.lambda_b;
  return out;
}

GeneratorSpectrum generator_gap(const TrigSeries& drift, const TrigSeries& diffusion, int n_fp) {
  check_grid(n_fp);
  const Collocation col(n_fp);
  const Eigen::VectorXd b = sample(drift, col.x);
  const Eigen::VectorXd big_b = sample(diffusion, col.x);
  const Eigen::MatrixXd gen = b.asDiagonal() * col.d1 + 0.5 * big_b.asDiagonal() * col.d2;
  GeneratorSpectrum out;
  out.eigenvalues = linalg::eigenvalues(gen);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](auto a, auto c) { return a.real() > c.real(); });
  double scale = 0.0;
  for (auto z : out.eigenvalues) scale = std::max(scale, std::abs(z));
  if (std::abs(out.eigenvalues[0]) > 1e-8 * scale)
    throw DegenerateGeneratorError("leading generator eigenvalue is not zero (" +
                                   std::to_string(out.eigenvalues[0].real()) + ")");
  out.gap = -out.eigenvalues[1].real();
  return out;
}

GeneratorSpectrum generator_gap(const ReducedModel& reduced, double sigma, int n_fp) {
  if (!(sigma > 0.0)) throw ValidationError("generator gap needs sigma > 0");
  const auto [drift, diffusion] = generator_series(reduced, sigma);
  return generator_gap(drift, diffusion, n_fp);
}

}  // namespace pulsesync
