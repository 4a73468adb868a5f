#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "pulsesync/errors.hpp"
#include "pulsesync/noise.hpp"
#include "pulsesync/trig.hpp"

using namespace pulsesync;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

/// h sum_i w(x_i) e_k(x_i + x) e_j(x_i + x) on the pulse grid.
double shifted_pairing(const std::vector<double>& w, const Grid1D& g, double x, int k, int j) {
  double s = 0.0;
  for (int i = 0; i < g.points(); ++i) {
    const double y = g.coordinate(i) + x;
    s += w[i] * basis(k, y) * (j == 99 ? 1.0 : basis(j, y));
  }
  return g.spacing() * s;
}

/// psi . g(u*) and psi . g'(u*) g(u*), pointwise.
std::pair<std::vector<double>, std::vector<double>> weights(const ModelSpec& m) {
  const PulseSolution& p = fixtures::pulse();
  const FieldState g = m.eval_noise_shape(p.profile);
  const FieldState gg = m.eval_noise_drift(p.profile);
  std::vector<double> w1(p.profile.points(), 0.0), w2(w1);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < p.profile.points(); ++i) {
      w1[i] += p.adjoint.at(c, i) * g.at(c, i);
      w2[i] += p.adjoint.at(c, i) * gg.at(c, i);
    }
  return {w1, w2};
}

}  // namespace

TEST_SUITE("reduction") {

TEST_CASE("noise basis is orthonormal and unit periodic") {
  const Grid1D g(4, 256);
  for (int k = -3; k <= 3; ++k)
    for (int j = -3; j <= 3; ++j) {
      double s = 0.0;
      const auto ek = basis_samples(g, k), ej = basis_samples(g, j);
      for (int i = 0; i < 64; ++i) s += ek[i] * ej[i];
      CHECK(s / 64.0 == doctest::Approx(k == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-13));
    }
  const auto e = basis_samples(g, -2);
  bool periodic = true;
  for (int i = 0; i + 64 < 256; ++i) periodic = periodic && e[i] == e[i + 64];
  CHECK(periodic);
  CHECK(basis(-1, 0.25) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("noise spec validation") {
  CHECK_THROWS_AS(NoiseSpec(1, {1.0, 2.0}, 0.1).validate(), ValidationError);
  CHECK_THROWS_AS(NoiseSpec(1, {1.0, 0.0, 1.0}, -0.1).validate(), ValidationError);
  const NoiseSpec n(2, {0.0, 1.0, 0.0, 1.0, 0.5}, 0.1);
  CHECK_FALSE(n.homogeneous());
  CHECK(n.active_modes() == std::vector<int>{-1, 1, 2});
  CHECK(NoiseSpec(1, {0.4, 0.0, 0.4}, 0.1).homogeneous());
}

TEST_CASE("trigonometric series algebra") {
  const TrigSeries a(0.3, {1.0, -0.5}, {0.25, 2.0});
  const TrigSeries b(-1.0, {0.0, 0.7, 0.1}, {1.5, 0.0, -0.3});
  const TrigSeries ab = a * b;
  const TrigSeries da = a.derivative();
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 20; ++t) {
    const double x = u(rng);
    CHECK(ab(x) == doctest::Approx(a(x) * b(x)).epsilon(1e-13));
    CHECK((a + b)(x) == doctest::Approx(a(x) + b(x)).epsilon(1e-13));
    const double h = 1e-5;
    CHECK(da(x) == doctest::Approx((a(x + h) - a(x - h)) / (2 * h)).epsilon(1e-7));
    CHECK(std::fabs(ab(x + 1.0) - ab(x)) <= 1e-13 * (1.0 + std::fabs(ab(x))));
  }
  CHECK(ab.order() == 5);
  CHECK(TrigSeries(0.5, {0.0, 0.0}, {1.0, 0.0}).trimmed().order() == 1);
}

TEST_CASE("uniform mode has a constant coefficient") {
  for (const ReducedModel* r : {&fixtures::reduced_inhomogeneous(), &fixtures::reduced_homogeneous()}) {
    CHECK(r->b_at(0).max_harmonic() == 0.0);
    CHECK(r->b_prime_at(0).max_harmonic() == 0.0);
    CHECK(r->b_prime_at(0).mean() == 0.0);
  }
}

TEST_CASE("homogeneous noise gives constant a and sum of b_k^2") {
  const ReducedModel& r = fixtures::reduced_homogeneous();
  const TrigSeries b2 = b_square_sum(r);
  CHECK(r.a.max_harmonic() <= 1e-10 * std::fabs(r.a.mean()));
  CHECK(b2.max_harmonic() <= 1e-10 * std::fabs(b2.mean()));
}

TEST_CASE("b_k against shifted-basis quadrature") {
  const ReducedModel& r = fixtures::reduced_inhomogeneous();
  const auto [w1, w2] = weights(fixtures::fhn(1.0, 0.5));
  const Grid1D& g = fixtures::pulse().profile.grid();
  for (double x : {0.0, 0.17, 0.5, 0.83}) {
    for (int k = -1; k <= 1; ++k) {
      const double direct = r.noise.alpha_at(k) * shifted_pairing(w1, g, x, k, 99);
      CHECK(r.b_at(k)(x) == doctest::Approx(direct).scale(1e-3).epsilon(1e-10));
    }
  }
}

TEST_CASE("a against the rotated second-variation form") {
  const ReducedModel& r = fixtures::reduced_inhomogeneous();
  const auto [w1, w2] = weights(fixtures::fhn(1.0, 0.5));
  const Grid1D& g = fixtures::pulse().profile.grid();
  const auto& q = r.pairings.q;
  for (double x : {0.0, 0.21, 0.64}) {
    const double th = two_pi * x;
    // e_1(. + x) = cos e_1 - sin e_-1,  e_-1(. + x) = sin e_1 + cos e_-1.
    auto form = [&](double v1, double v2) {
      return v1 * v1 * q[1][0] + 2 * v1 * v2 * q[1][1] + v2 * v2 * q[1][2];
    };
    const double a1 = r.noise.alpha_at(1), am = r.noise.alpha_at(-1), a0 = r.noise.alpha_at(0);
    double direct = a0 * a0 * (shifted_pairing(w2, g, x, 0, 0) + q[0][0]);
    direct += a1 * a1 * (shifted_pairing(w2, g, x, 1, 1) + form(std::cos(th), -std::sin(th)));
    direct += am * am * (shifted_pairing(w2, g, x, -1, -1) + form(std::sin(th), std::cos(th)));
    direct *= 0.5;
    CHECK(r.a(x) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("Stratonovich drift identity") {
  const ReducedModel& r = fixtures::reduced_inhomogeneous();
  for (double x : {0.1, 0.4, 0.9}) {
    double corr = 0.0;
    for (int k = -1; k <= 1; ++k) corr += r.b_at(k)(x) * r.b_prime_at(k)(x);
    CHECK(r.strat(x) == doctest::Approx(r.a(x) - 0.5 * corr).epsilon(1e-12));
  }
}

TEST_CASE("nondegeneracy guard") {
  const ReducedModel& r = fixtures::reduced_inhomogeneous();
  CHECK(nondegeneracy_check(r.noise, r.pairings).passed);
  const NoiseSpec missing(1, {0.0, 0.3, 1.0}, 0.1);
  const auto report = nondegeneracy_check(missing, r.pairings);
  CHECK_FALSE(report.passed);
  CHECK(report.reason.find("alpha") != std::string::npos);
  PairingSet zero = r.pairings;
  zero.c = {0.0, zero.c[1], 0.0};
  CHECK_FALSE(nondegeneracy_check(r.noise, zero).passed);
}

TEST_CASE("reduced model files round-trip exactly") {
  const ReducedModel& r = fixtures::reduced_inhomogeneous();
  std::stringstream ss;
  write_reduced(ss, r);
  const ReducedModel s = read_reduced(ss);
  CHECK(s.speed == r.speed);
  CHECK(s.a == r.a);
  CHECK(s.strat == r.strat);
  for (int k = -1; k <= 1; ++k) CHECK(s.b_at(k) == r.b_at(k));
  std::stringstream bad(R"({"format": "other"})");
  CHECK_THROWS_AS(read_reduced(bad), ValidationError);
}

}  // TEST_SUITE
