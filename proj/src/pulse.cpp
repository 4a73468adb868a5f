#include "pulsesync/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pulsesync/errors.hpp"
#include "pulsesync/evolve.hpp"
#include "pulsesync/linalg.hpp"
#include "pulsesync/spectral.hpp"

namespace pulsesync {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(const FieldState& f) {
  return {f.values().data(), static_cast<Eigen::Index>(f.size())};
}

void assign(FieldState& f, const Eigen::VectorXd& v) {
  std::copy(v.data(), v.data() + v.size(), f.values().begin());
}

double amplitude(const FieldState& u) {
  double amp = 0.0;
  for (int c = 0; c < u.components(); ++c) {
    auto x = u.component(c);
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    amp = std::max(amp, *hi - *lo);
  }
  return amp;
}

/// D u'' + c u' + f(u), stacked component-major.
FieldState traveling_wave_residual(const ModelSpec& model, const Spectral1D& spectral,
                                   const FieldState& u, double speed) {
  FieldState out = model.eval_reaction(u);
  std::vector<double> d1(u.points()), d2(u.points());
  for (int c = 0; c < u.components(); ++c) {
    spectral.derivative(u.component(c), d1, 1);
    spectral.derivative(u.component(c), d2, 2);
    auto dst = out.component(c);
    for (int i = 0; i < u.points(); ++i)
      dst[i] += model.diffusion[c] * d2[i] + speed * d1[i];
  }
  return out;
}

Eigen::MatrixXd linearization_from(const ModelSpec& model, const FieldState& profile,
                                   double speed, const Eigen::MatrixXd& d1,
                                   const Eigen::MatrixXd& d2) {
  const int n = profile.components();
  const int pts = profile.points();
  const FieldState jac = model.eval_reaction_jacobian(profile);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n * pts, n * pts);
  for (int r = 0; r < n; ++r) {
    l.block(r * pts, r * pts, pts, pts) = model.diffusion[r] * d2 + speed * d1;
    for (int c = 0; c < n; ++c) {
      auto j = jac.component(r * n + c);
      for (int i = 0; i < pts; ++i) l(r * pts + i, c * pts + i) += j[i];
    }
  }
  return l;
}

double circular_centre(std::span<const double> u, const Grid1D& grid) {
  double s = 0.0, cs = 0.0;
  double base = *std::min_element(u.begin(), u.end());
  for (int i = 0; i < grid.points(); ++i) {
    const double w = u[i] - base;
    const double th = 2.0 * std::numbers::pi * grid.coordinate(i) / grid.length();
    s += w * std::sin(th);
    cs += w * std::cos(th);
  }
  return wrap(std::atan2(s, cs) / (2.0 * std::numbers::pi), 1.0) * grid.length();
}

}  // namespace

Eigen::MatrixXd linearization_matrix(const ModelSpec& model, const FieldState& profile,
                                     double speed) {
  const Spectral1D spectral(profile.grid());
  return linearization_from(model, profile, speed, spectral.derivative_matrix(1),
                            spectral.derivative_matrix(2));
}

PulseSolution find_pulse(const ModelSpec& model, const FieldState& guess, double guess_speed,
                         const PulseOptions& options) {
  model.validate();
  if (guess.components() != model.components)
    throw ValidationError("pulse guess component count does not match the model");
  if (!guess.all_finite()) throw ValidationError("pulse guess contains non-finite values");

  const Grid1D& grid = guess.grid();
  const Spectral1D spectral(grid);
  const Eigen::MatrixXd d1 = spectral.derivative_matrix(1);
  const Eigen::MatrixXd d2 = spectral.derivative_matrix(2);
  const int pts = grid.points();
  const int m = model.components * pts;
  const double h = grid.spacing();

  const FieldState anchor_slope = derivative(guess);
  const auto anchor = as_vector(anchor_slope);

  FieldState u = guess;
  double c = guess_speed;

  auto residual_norm = [&](const FieldState& state, double speed, FieldState* out,
                           double* phase) {
    FieldState r = traveling_wave_residual(model, spectral, state, speed);
    const double ph = inner(anchor_slope, state - guess);
    if (out) *out = r;
    if (phase) *phase = ph;
    return std::sqrt(inner(r, r) + ph * ph);
  };

  FieldState r(grid, model.components);
  double phase = 0.0;
  double res = residual_norm(u, c, &r, &phase);
  int iter = 0;
  for (; iter < options.max_iter && res > options.newton_tol; ++iter) {
    if (amplitude(u) < options.trivial_amplitude)
      throw NoPulseError("Newton iteration collapsed to a spatially uniform state", res);

    Eigen::MatrixXd jac(m + 1, m + 1);
    jac.topLeftCorner(m, m) = linearization_from(model, u, c, d1, d2);
    FieldState slope = derivative(u);
    jac.topRightCorner(m, 1) = as_vector(slope);
    jac.bottomLeftCorner(1, m) = h * anchor.transpose();
    jac(m, m) = 0.0;

    linalg::LuFactorization lu(std::move(jac));
    if (lu.singular()) {
      if (amplitude(u) < 10.0 * options.trivial_amplitude)
        throw NoPulseError("Newton iteration collapsed to a spatially uniform state", res);
      throw DegeneratePulseError("singular Jacobian in the traveling-wave Newton iteration");
    }

    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = -as_vector(r);
    rhs(m) = -phase;
    const Eigen::VectorXd delta = lu.solve(rhs);

    FieldState du(grid, model.components);
    assign(du, delta.head(m));
    double step = 1.0;
    for (;;) {
      FieldState trial = u + step * du;
      const double ct = c + step * delta(m);
      FieldState rt(grid, model.components);
      double pht = 0.0;
      const double rest = residual_norm(trial, ct, &rt, &pht);
      if (std::isfinite(rest) && (rest < (1.0 - 1e-4 * step) * res || step < 1.0 / 64)) {
        u = std::move(trial);
        c = ct;
        r = std::move(rt);
        phase = pht;
        res = rest;
        break;
      }
      step *= 0.5;
    }
  }

  if (!(res <= options.tol_bvp))
    throw NoPulseError("traveling-wave Newton iteration did not converge, residual " +
                           std::to_string(res),
                       res);
  if (amplitude(u) < options.trivial_amplitude)
    throw NoPulseError("Newton iteration converged to a spatially uniform state", res);

  PulseSolution pulse(u, derivative(u), FieldState(grid, model.components));
  pulse.speed = c;
  pulse.bvp_residual = std::sqrt(inner(r, r));
  pulse.newton_iterations = iter;
  compute_adjoint(pulse, model, options);

  if (options.compute_spectrum) {
    pulse.spectrum = linalg::eigenvalues(linearization_from(model, u, c, d1, d2));
    std::sort(pulse.spectrum.begin(), pulse.spectrum.end(),
              [](auto a, auto b) { return a.real() > b.real(); });
    auto nearest = std::min_element(pulse.spectrum.begin(), pulse.spectrum.end(),
                                    [](auto a, auto b) { return std::abs(a) < std::abs(b); });
    pulse.zero_eigenvalue = nearest->real();
    pulse.near_zero_count = static_cast<int>(
        std::count_if(pulse.spectrum.begin(), pulse.spectrum.end(),
                      [&](auto z) { return std::abs(z) <= options.tol_eig; }));
    double top = -std::numeric_limits<double>::infinity();
    for (auto it = pulse.spectrum.begin(); it != pulse.spectrum.end(); ++it)
      if (it != nearest) top = std::max(top, it->real());
    pulse.a_gap = -top;
  }
  return pulse;
}

FieldState compute_adjoint(PulseSolution& pulse, const ModelSpec& model,
                           const PulseOptions& options) {
  const FieldState& u = pulse.profile;
  const Grid1D& grid = u.grid();
  const int m = u.components() * u.points();
  const Eigen::MatrixXd l = linearization_matrix(model, u, pulse.speed);
  const double lnorm = l.cwiseAbs().colwise().sum().maxCoeff();

  const Eigen::VectorXd sv = linalg::singular_values(l);
  pulse.second_singular = sv(m - 2) / sv(0);
  if (pulse.second_singular < options.separation)
    throw IllConditionedNullspaceError(
        "linearisation has a nearly two-dimensional nullspace (second singular value " +
        std::to_string(pulse.second_singular) + ")");

  linalg::LuFactorization lu(l);
  if (lu.singular()) {
    // Exact zero pivot: move the shift off zero by a round-off amount.
    Eigen::MatrixXd shifted = l;
    shifted.diagonal().array() -= 1e-14 * lnorm;
    lu = linalg::LuFactorization(std::move(shifted));
  }

  auto inverse_iteration = [&](bool transpose) {
    Eigen::VectorXd x = Eigen::VectorXd::Ones(m);
    for (int i = 0; i < m; ++i) x(i) += 0.5 * std::sin(0.37 * i);
    for (int it = 0; it < 4; ++it) {
      x = lu.solve(x, transpose);
      x /= x.norm();
    }
    return x;
  };

  const auto slope = as_vector(pulse.derivative);
  const Eigen::VectorXd right = inverse_iteration(false);
  pulse.eigenvector_cosine = std::fabs(right.dot(slope)) / (right.norm() * slope.norm());

  Eigen::VectorXd psi = inverse_iteration(true);
  const double pairing = grid.spacing() * psi.dot(slope);
  psi *= -1.0 / pairing;
  pulse.adjoint = FieldState(grid, u.components());
  assign(pulse.adjoint, psi);
  pulse.normalization = inner(pulse.adjoint, pulse.derivative);
  pulse.adjoint_residual = (l.transpose() * psi).norm() / psi.norm();
  if (!(pulse.adjoint_residual <= options.tol_adj))
    throw IllConditionedNullspaceError("adjoint inverse iteration residual " +
                                       std::to_string(pulse.adjoint_residual) +
                                       " exceeds tolerance");
  return pulse.adjoint;
}

std::pair<FieldState, double> simulated_pulse_guess(const ModelSpec& model, const Grid1D& grid,
                                                    double warmup, double dt) {
  model.validate();
  FieldState u(grid, model.components);
  const double len = grid.length();
  const double centre = 0.5 * len;
  const double half_width = 0.05 * len;
  for (int i = 0; i < grid.points(); ++i) {
    const double x = grid.coordinate(i);
    if (std::fabs(x - centre) < half_width) u.at(0, i) = 1.0;
    if (model.components > 1 && x > centre - 4.0 * half_width && x < centre) u.at(1, i) = 0.3;
  }
  const double probe = std::min(50.0, 0.25 * warmup);
  u = evolve_pde(u, model, warmup - probe, dt);
  const double x0 = circular_centre(u.component(0), grid);
  u = evolve_pde(u, model, probe, dt);
  const double x1 = circular_centre(u.component(0), grid);
  double moved = x1 - x0;
  moved -= len * std::round(moved / len);
  const double speed = moved / probe;
  FieldState centred = translate(u, centre - x1);
  centred.set_time(0.0);
  if (amplitude(centred) < 0.1)
    throw NoPulseError("no excitation survived the warm-up simulation", amplitude(centred));
  return {centred, speed};
}

}  // namespace pulsesync
