#include "pulsesync/reduction.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "pulsesync/errors.hpp"
#include "pulsesync/parallel.hpp"
#include "pulsesync/spectral.hpp"

namespace pulsesync {

namespace {

/// Pointwise R^n contraction sum_c a_c(x) b_c(x).
std::vector<double> contract(const FieldState& a, const FieldState& b) {
  std::vector<double> out(a.points(), 0.0);
  for (int c = 0; c < a.components(); ++c) {
    auto x = a.component(c);
    auto y = b.component(c);
    for (int i = 0; i < a.points(); ++i) out[i] += x[i] * y[i];
  }
  return out;
}

double pair(const std::vector<double>& f, const std::vector<double>& e, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * e[i];
  return h * s;
}

/// Field with every component of `shape` multiplied by the scalar profile `e`.
FieldState modulate(const FieldState& shape, const std::vector<double>& e) {
  FieldState out = shape;
  for (int c = 0; c < out.components(); ++c) {
    auto x = out.component(c);
    for (int i = 0; i < out.points(); ++i) x[i] *= e[i];
  }
  return out;
}

std::vector<double> squared(std::vector<double> e) {
  for (double& v : e) v *= v;
  return e;
}

}  // namespace

PairingSet fourier_pairings(const PulseSolution& pulse, const ModelSpec& model, int K) {
  if (K < 1) throw ValidationError("noise truncation K must be at least 1");
  const Grid1D& grid = pulse.grid();
  const double h = grid.spacing();
  const auto psi_g = contract(pulse.adjoint, model.eval_noise_shape(pulse.profile));
  const auto psi_gg = contract(pulse.adjoint, model.eval_noise_drift(pulse.profile));

  PairingSet p;
  p.K = K;
  p.c.resize(2 * K + 1);
  p.d.resize(4 * K + 1);
  p.q.assign(K + 1, {0.0, 0.0, 0.0});
  for (int k = -K; k <= K; ++k) p.c[k + K] = pair(psi_g, basis_samples(grid, k), h);
  for (int j = -2 * K; j <= 2 * K; ++j) p.d[j + 2 * K] = pair(psi_gg, basis_samples(grid, j), h);
  p.psi_g_norm2 = pair(psi_g, psi_g, h);
  return p;
}

void q_matrix(PairingSet& pairings, const IsochronMap& isochron, const ModelSpec& model,
              double eps, const std::function<bool(int)>& skip) {
  if (!(eps > 0.0)) throw ValidationError("finite-difference step must be positive");
  const FieldState& u = isochron.profile();
  const FieldState g = model.eval_noise_shape(u);
  const int K = pairings.K;
  pairings.q.assign(K + 1, {0.0, 0.0, 0.0});
  pairings.q_eps = eps;

  auto diagonal = [&](const FieldState& dir) {
    const double n = norm(dir);
    if (n == 0.0) return 0.0;
    const FieldState unit = (1.0 / n) * dir;
    return n * n * (isochron(u + eps * unit) + isochron(u - eps * unit)) / (eps * eps);
  };
  auto mixed = [&](const FieldState& v, const FieldState& w) {
    const double nv = norm(v), nw = norm(w);
    if (nv == 0.0 || nw == 0.0) return 0.0;
    return nv * nw * isochron.second_variation((1.0 / nv) * v, (1.0 / nw) * w, eps);
  };

  parallel_for(static_cast<std::size_t>(K + 1), [&](std::size_t idx) {
    const int k = static_cast<int>(idx);
    if (skip && skip(k)) return;
    try {
      const FieldState vk = modulate(g, basis_samples(u.grid(), k));
      if (k == 0) {
        pairings.q[0][0] = diagonal(vk);
        return;
      }
      const FieldState vm = modulate(g, basis_samples(u.grid(), -k));
      pairings.q[k] = {diagonal(vk), mixed(vk, vm), diagonal(vm)};
    } catch (const LeftBasinError& e) {
      throw LeftBasinError("second variation for noise mode " + std::to_string(k) + ": " +
                               e.what(),
                           e.tube_distance());
    }
  });
}

std::vector<TrigSeries> build_b(const NoiseSpec& noise, const PairingSet& pairings) {
  const int K = noise.K;
  if (pairings.K < K) throw ValidationError("pairings do not cover the noise truncation");
  std::vector<TrigSeries> b(2 * K + 1);
  b[K] = TrigSeries(0, noise.alpha_at(0) * pairings.c_at(0));
  for (int k = 1; k <= K; ++k) {
    const double ck = pairings.c_at(k), cm = pairings.c_at(-k);
    TrigSeries plus(k), minus(k);
    plus.cos_coeff(k) = noise.alpha_at(k) * ck;
    plus.sin_coeff(k) = -noise.alpha_at(k) * cm;
    minus.cos_coeff(k) = noise.alpha_at(-k) * cm;
    minus.sin_coeff(k) = noise.alpha_at(-k) * ck;
    b[K + k] = std::move(plus);
    b[K - k] = std::move(minus);
  }
  return b;
}

TrigSeries build_a(const NoiseSpec& noise, const PairingSet& pairings) {
  const int K = noise.K;
  if (pairings.K < K) throw ValidationError("pairings do not cover the noise truncation");
  const double d0 = pairings.d_at(0);
  const double a0 = noise.alpha_at(0);
  TrigSeries a(2 * K, 0.5 * a0 * a0 * (d0 + pairings.q[0][0]));
  for (int k = 1; k <= K; ++k) {
    const double ap = noise.alpha_at(k), am = noise.alpha_at(-k);
    const auto [qkk, qkm, qmm] = pairings.q[k];
    const double sum = ap * ap + am * am;
    const double diff = ap * ap - am * am;
    a.mean() += 0.5 * sum * (d0 + 0.5 * (qkk + qmm));
    a.cos_coeff(2 * k) +=
        0.5 * diff * (pairings.d_at(2 * k) / std::numbers::sqrt2 + 0.5 * (qkk - qmm));
    a.sin_coeff(2 * k) += 0.5 * diff * (-pairings.d_at(-2 * k) / std::numbers::sqrt2 - qkm);
  }
  return a;
}

NondegeneracyReport nondegeneracy_check(const NoiseSpec& noise, const PairingSet& pairings) {
  NondegeneracyReport r;
  r.c_norm2 = pairings.c_at(1) * pairings.c_at(1) + pairings.c_at(-1) * pairings.c_at(-1);
  r.threshold = 1e-12 * pairings.psi_g_norm2;
  const auto b = build_b(noise, pairings);
  const TrigSeries& b1 = b[noise.K + 1];
  const TrigSeries& bm1 = b[noise.K - 1];
  r.min_b_norm2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 1024; ++i) {
    const double x = i / 1024.0;
    r.min_b_norm2 = std::min(r.min_b_norm2, b1(x) * b1(x) + bm1(x) * bm1(x));
  }
  if (noise.alpha_at(1) == 0.0 || noise.alpha_at(-1) == 0.0)
    r.reason = "noise nondegeneracy violated: alpha_1 and alpha_-1 must both be nonzero";
  else if (!(r.c_norm2 > r.threshold))
    r.reason = "noise nondegeneracy violated: c_1^2 + c_-1^2 is below threshold";
  else
    r.passed = true;
  return r;
}

TrigSeries strat_drift(const ReducedModel& reduced) {
  TrigSeries out = reduced.a;
  for (std::size_t i = 0; i < reduced.b.size(); ++i)
    out -= 0.5 * (reduced.b_prime[i] * reduced.b[i]);
  return out;
}

TrigSeries b_square_sum(const ReducedModel& reduced) {
  TrigSeries out;
  for (const auto& b : reduced.b) out += b * b;
  return out;
}

ReducedModel build_reduced(double speed, const NoiseSpec& noise, const PairingSet& pairings) {
  noise.validate();
  ReducedModel r;
  r.speed = speed;
  r.noise = noise;
  r.pairings = pairings;
  r.a = build_a(noise, pairings);
  r.a_prime = r.a.derivative();
  r.b = build_b(noise, pairings);
  for (const auto& b : r.b) r.b_prime.push_back(b.derivative());
  r.strat = strat_drift(r);
  return r;
}

DirectCoefficients direct_coefficients(const IsochronMap& isochron, const ModelSpec& model,
                                       const NoiseSpec& noise, double x, double eps) {
  const FieldState ux = translate(isochron.profile(), x);
  const FieldState g = model.eval_noise_shape(ux);
  const FieldState gg = model.eval_noise_drift(ux);
  const int K = noise.K;
  DirectCoefficients out;
  out.b.assign(2 * K + 1, 0.0);
  const double base = isochron(ux);
  for (int k = -K; k <= K; ++k) {
    const double alpha = noise.alpha_at(k);
    if (alpha == 0.0) continue;
    const auto e = basis_samples(ux.grid(), k);
    const FieldState v = modulate(g, e);
    const FieldState w = modulate(gg, squared(e));
    const double nv = norm(v);
    if (nv == 0.0) {
      // b_k vanishes; only the g'g term of a survives.
      const double nw = norm(w);
      if (nw > 0.0) {
        const double s = eps / nw;
        const double d = (isochron(ux + s * w) - isochron(ux - s * w)) / (2.0 * s);
        out.a += 0.5 * alpha * alpha * d;
      }
      continue;
    }
    const double s = eps / nv;
    const FieldState half = (0.5 * s * s) * w;
    const double fp = isochron(ux + s * v + half);
    const double fm = isochron(ux - s * v + half);
    out.a += 0.5 * alpha * alpha * (fp + fm - 2.0 * base) / (s * s);
    out.b[k + K] = alpha * (isochron(ux + s * v) - isochron(ux - s * v)) / (2.0 * s);
  }
  return out;
}

namespace {

nlohmann::json to_json(const TrigSeries& s) {
  return {{"mean", s.mean()}, {"cos", s.cos_coeffs()}, {"sin", s.sin_coeffs()}};
}

TrigSeries series_from_json(const nlohmann::json& j) {
  return TrigSeries(j.at("mean").get<double>(), j.at("cos").get<std::vector<double>>(),
                    j.at("sin").get<std::vector<double>>());
}

}  // namespace

void write_reduced(std::ostream& os, const ReducedModel& r) {
  nlohmann::json q = nlohmann::json::array();
  for (const auto& row : r.pairings.q) q.push_back(row);
  nlohmann::json b = nlohmann::json::array();
  for (const auto& s : r.b) b.push_back(to_json(s));
  nlohmann::json doc = {
      {"format", "pulsesync-reduced"},
      {"version", 1},
      {"speed", r.speed},
      {"noise", {{"K", r.noise.K}, {"sigma", r.noise.sigma}, {"alpha", r.noise.alpha}}},
      {"pairings",
       {{"K", r.pairings.K},
        {"c", r.pairings.c},
        {"d", r.pairings.d},
        {"q", q},
        {"psi_g_norm2", r.pairings.psi_g_norm2},
        {"q_eps", r.pairings.q_eps}}},
      {"a", to_json(r.a)},
      {"b", b},
      {"strat", to_json(r.strat)},
  };
  os << doc.dump(1) << '\n';
}

void write_reduced(const std::filesystem::path& path, const ReducedModel& reduced) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open " + path.string() + " for writing");
  write_reduced(os, reduced);
}

ReducedModel read_reduced(std::istream& is) {
  try {
    const auto doc = nlohmann::json::parse(is);
    if (doc.at("format") != "pulsesync-reduced")
      throw ValidationError("not a reduced-model document");
    ReducedModel r;
    r.speed = doc.at("speed").get<double>();
    const auto& n = doc.at("noise");
    r.noise = NoiseSpec(n.at("K").get<int>(), n.at("alpha").get<std::vector<double>>(),
                        n.at("sigma").get<double>());
    const auto& p = doc.at("pairings");
    r.pairings.K = p.at("K").get<int>();
    r.pairings.c = p.at("c").get<std::vector<double>>();
    r.pairings.d = p.at("d").get<std::vector<double>>();
    r.pairings.q = p.at("q").get<std::vector<std::array<double, 3>>>();
    r.pairings.psi_g_norm2 = p.at("psi_g_norm2").get<double>();
    r.pairings.q_eps = p.at("q_eps").get<double>();
    if (r.pairings.K < r.noise.K || r.pairings.c.size() != std::size_t(2 * r.pairings.K + 1) ||
        r.pairings.d.size() != std::size_t(4 * r.pairings.K + 1) ||
        r.pairings.q.size() != std::size_t(r.pairings.K + 1))
      throw ValidationError("reduced model: pairing tables have inconsistent sizes");
    r.a = series_from_json(doc.at("a"));
    r.a_prime = r.a.derivative();
    for (const auto& s : doc.at("b")) r.b.push_back(series_from_json(s));
    if (r.b.size() != std::size_t(2 * r.noise.K + 1))
      throw ValidationError("reduced model: expected 2K+1 diffusion series");
    for (const auto& s : r.b) r.b_prime.push_back(s.derivative());
    r.strat = series_from_json(doc.at("strat"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("reduced model document: ") + e.what());
  }
}

ReducedModel read_reduced(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path.string());
  return read_reduced(is);
}

}  // namespace pulsesync
