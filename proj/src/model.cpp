#include "pulsesync/model.hpp"

#include <algorithm>

#include "pulsesync/errors.hpp"

namespace pulsesync {

void ModelSpec::validate() const {
  if (components <= 0) throw ValidationError("model needs at least one component");
  if (static_cast<int>(diffusion.size()) != components)
    throw ValidationError("one diffusion coefficient per component required");
  if (std::any_of(diffusion.begin(), diffusion.end(), [](double d) { return d < 0.0; }))
    throw ValidationError("diffusion coefficients must be nonnegative");
  if (std::none_of(diffusion.begin(), diffusion.end(), [](double d) { return d > 0.0; }))
    throw ValidationError("at least one component must diffuse");
  if (!reaction || !reaction_jacobian || !noise_shape || !noise_jacobian)
    throw ValidationError("model maps are incomplete");
}

FieldState ModelSpec::eval_reaction(const FieldState& u) const {
  FieldState out(u.grid(), components, u.time());
  reaction(u, out);
  return out;
}

FieldState ModelSpec::eval_reaction_jacobian(const FieldState& u) const {
  FieldState out(u.grid(), components * components, u.time());
  reaction_jacobian(u, out);
  return out;
}

FieldState ModelSpec::eval_noise_shape(const FieldState& u) const {
  FieldState out(u.grid(), components, u.time());
  noise_shape(u, out);
  return out;
}

FieldState ModelSpec::eval_noise_drift(const FieldState& u) const {
  const FieldState g = eval_noise_shape(u);
  FieldState jac(u.grid(), components * components, u.time());
  noise_jacobian(u, jac);
  FieldState out(u.grid(), components, u.time());
  for (int r = 0; r < components; ++r) {
    auto dst = out.component(r);
    for (int c = 0; c < components; ++c) {
      auto j = jac.component(r * components + c);
      auto gc = g.component(c);
      for (int i = 0; i < u.points(); ++i) dst[i] += j[i] * gc[i];
    }
  }
  return out;
}

ModelSpec fitzhugh_nagumo(const FhnParameters& p, const NoiseShape& g) {
  if (!(p.nu > 0.0)) throw ValidationError("FitzHugh-Nagumo requires nu > 0");
  if (!(p.a > 0.0 && p.a < 0.5)) throw ValidationError("FitzHugh-Nagumo requires 0 < a < 1/2");
  if (!(p.epsilon > 0.0)) throw ValidationError("FitzHugh-Nagumo requires epsilon > 0");

  ModelSpec m;
  m.name = "fitzhugh-nagumo";
  m.components = 2;
  m.diffusion = {p.nu, 0.0};
  m.parameters = {{"nu", p.nu},
                  {"a", p.a},
                  {"epsilon", p.epsilon},
                  {"gamma", p.gamma},
                  {"g_constant", g.constant},
                  {"g_linear", g.linear}};

  m.reaction = [p](const FieldState& s, FieldState& out) {
    auto u = s.component(0);
    auto v = s.component(1);
    auto fu = out.component(0);
    auto fv = out.component(1);
    for (std::size_t i = 0; i < u.size(); ++i) {
      fu[i] = u[i] * (u[i] - p.a) * (1.0 - u[i]) - v[i];
      fv[i] = p.epsilon * (u[i] - p.gamma * v[i]);
    }
  };
  m.reaction_jacobian = [p](const FieldState& s, FieldState& out) {
    auto u = s.component(0);
    auto j00 = out.component(0);
    auto j01 = out.component(1);
    auto j10 = out.component(2);
    auto j11 = out.component(3);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double x = u[i];
      j00[i] = -3.0 * x * x + 2.0 * (1.0 + p.a) * x - p.a;
      j01[i] = -1.0;
      j10[i] = p.epsilon;
      j11[i] = -p.epsilon * p.gamma;
    }
  };
  m.noise_shape = [g](const FieldState& s, FieldState& out) {
    auto u = s.component(0);
    auto g0 = out.component(0);
    auto g1 = out.component(1);
    for (std::size_t i = 0; i < u.size(); ++i) {
      g0[i] = g.constant + g.linear * u[i];
      g1[i] = 0.0;
    }
  };
  m.noise_jacobian = [g](const FieldState& s, FieldState& out) {
    std::fill(out.values().begin(), out.values().end(), 0.0);
    auto j00 = out.component(0);
    for (std::size_t i = 0; i < j00.size(); ++i) j00[i] = g.linear;
    (void)s;
  };
  return m;
}

ModelSpec linear_model(std::vector<double> diffusion, std::vector<double> matrix) {
  if (diffusion.size() != 2 || matrix.size() != 4)
    throw ValidationError("linear model is two-component");
  ModelSpec m;
  m.name = "linear";
  m.components = 2;
  m.diffusion = std::move(diffusion);
  m.reaction = [matrix](const FieldState& s, FieldState& out) {
    for (int r = 0; r < 2; ++r) {
      auto dst = out.component(r);
      auto a = s.component(0);
      auto b = s.component(1);
      for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = matrix[2 * r] * a[i] + matrix[2 * r + 1] * b[i];
    }
  };
  m.reaction_jacobian = [matrix](const FieldState&, FieldState& out) {
    for (int k = 0; k < 4; ++k) {
      auto dst = out.component(k);
      std::fill(dst.begin(), dst.end(), matrix[k]);
    }
  };
  m.noise_shape = [](const FieldState&, FieldState& out) {
    auto g0 = out.component(0);
    std::fill(g0.begin(), g0.end(), 1.0);
    auto g1 = out.component(1);
    std::fill(g1.begin(), g1.end(), 0.0);
  };
  m.noise_jacobian = [](const FieldState&, FieldState& out) {
    std::fill(out.values().begin(), out.values().end(), 0.0);
  };
  return m;
}

}  // namespace pulsesync
