#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pulsesync/grid.hpp"

namespace pulsesync {

/// Field-level nonlinearity: fills `out` from `u`. Jacobians are stored as
/// n*n components in row-major order (component r*n + c is d out_r / d u_c).
using FieldMap = std::function<void(const FieldState& u, FieldState& out)>;

/// Reaction-diffusion system du = (D u_xx + f(u)) dt + sigma g(u) o dW.
struct ModelSpec {
  std::string name;
  int components = 0;
  std::vector<double> diffusion;
  FieldMap reaction;
  FieldMap reaction_jacobian;
  FieldMap noise_shape;
  FieldMap noise_jacobian;
  std::vector<std::pair<std::string, double>> parameters;

  void validate() const;

  FieldState eval_reaction(const FieldState& u) const;
  FieldState eval_reaction_jacobian(const FieldState& u) const;
  FieldState eval_noise_shape(const FieldState& u) const;
  /// g'(u) g(u), the Stratonovich-to-Ito drift direction.
  FieldState eval_noise_drift(const FieldState& u) const;
};

struct FhnParameters {
  double nu = 0.04;
  double a = 0.1;
  double epsilon = 0.01;
  double gamma = 4.0;
};

/// Noise shape acting on the u-component only: g(u, v) = (constant + linear u, 0).
struct NoiseShape {
  double constant = 1.0;
  double linear = 0.0;
};

/// FitzHugh-Nagumo: u_t = nu u_xx + u(u - a)(1 - u) - v, v_t = epsilon (u - gamma v).
ModelSpec fitzhugh_nagumo(const FhnParameters& p = {}, const NoiseShape& g = {});

/// Two-component linear system u_t = D u_xx + M u (test fixture without pulses).
ModelSpec linear_model(std::vector<double> diffusion, std::vector<double> matrix);

}  // namespace pulsesync
