#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "pulsesync/model.hpp"

namespace pulsesync {

struct PulseOptions {
  double newton_tol = 1e-10;   // target residual
  double tol_bvp = 1e-8;       // accepted residual when Newton stagnates
  double tol_adj = 1e-8;       // relative adjoint residual
  double tol_eig = 1e-6;       // translational eigenvalue window
  int max_iter = 30;
  double trivial_amplitude = 1e-3;
  /// Second-smallest singular value of the linearisation, relative to the
  /// largest, below which the nullspace is considered ill-conditioned.
  double separation = 1e-10;
  bool compute_spectrum = true;
};

/// Traveling pulse u(t, x) = u*(x - c t) together with its adjoint and the
/// spectral diagnostics of L = D d_xx + c d_x + f'(u*).
struct PulseSolution {
  PulseSolution(FieldState profile_, FieldState derivative_, FieldState adjoint_)
      : profile(std::move(profile_)),
        derivative(std::move(derivative_)),
        adjoint(std::move(adjoint_)) {}

  FieldState profile;
  FieldState derivative;
  FieldState adjoint;
  double speed = 0.0;
  double bvp_residual = 0.0;
  double adjoint_residual = 0.0;
  double normalization = 0.0;       // <psi, d_x u*>, -1 after scaling
  double zero_eigenvalue = 0.0;     // eigenvalue of smallest modulus
  int near_zero_count = 0;          // eigenvalues with |lambda| <= tol_eig
  double a_gap = 0.0;               // -max Re over the remaining spectrum
  double eigenvector_cosine = 0.0;  // |cos| between null vector and d_x u*
  double second_singular = 0.0;     // relative second-smallest singular value
  int newton_iterations = 0;
  std::vector<std::complex<double>> spectrum;

  const Grid1D& grid() const noexcept { return profile.grid(); }
};

/// Dense matrix of the linearisation L at (profile, speed), acting on the
/// component-major stacking of the field.
Eigen::MatrixXd linearization_matrix(const ModelSpec& model, const FieldState& profile,
                                     double speed);

/// Newton iteration for D u'' + c u' + f(u) = 0 with the phase condition
/// <guess', u - guess> = 0, followed by the adjoint and spectral diagnostics.
PulseSolution find_pulse(const ModelSpec& model, const FieldState& guess, double guess_speed,
                         const PulseOptions& options = {});

/// Null vector of L^T by inverse iteration (shift 0), scaled so that
/// <psi, d_x u*> = -1. Also fills the residual and separation diagnostics.
FieldState compute_adjoint(PulseSolution& pulse, const ModelSpec& model,
                           const PulseOptions& options = {});

/// Initial guess for find_pulse: a one-sided excitation evolved until a
/// single pulse has formed, recentred at L/2. Returns the guess and the
/// measured speed.
std::pair<FieldState, double> simulated_pulse_guess(const ModelSpec& model, const Grid1D& grid,
                                                    double warmup = 400.0, double dt = 0.01);

}  // namespace pulsesync
