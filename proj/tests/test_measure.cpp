#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "pulsesync/errors.hpp"
#include "pulsesync/measure.hpp"

using namespace pulsesync;

TEST_SUITE("measure") {

TEST_CASE("gradient drift gives a von Mises density") {
  // Zero flux: (1/2) p' = b p with b = -pi kappa sin(2 pi x), so p = exp(kappa cos 2 pi x) / I0(kappa).
  const double kappa = 1.3;
  const TrigSeries drift(0.0, {0.0}, {-std::numbers::pi * kappa});
  const TrigSeries diffusion(1.0, {}, {});
  const StationaryDensity d = stationary_density(drift, diffusion, 128);
  const double norm = std::cyl_bessel_i(0.0, kappa);
  for (std::size_t i = 0; i < d.x.size(); ++i)
    CHECK(d.p[i] == doctest::Approx(std::exp(kappa * std::cos(2 * std::numbers::pi * d.x[i])) / norm)
                        .epsilon(1e-11));
  CHECK(std::fabs(d.flux) < 1e-10);
  CHECK(d.integral == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant coefficients have a Fourier spectrum") {
  const double c = 0.4, b2 = 0.3;
  const GeneratorSpectrum s = generator_gap(TrigSeries(c, {}, {}), TrigSeries(b2, {}, {}), 64);
  const double k = 2.0 * std::numbers::pi;
  CHECK(s.gap == doctest::Approx(0.5 * b2 * k * k).epsilon(1e-10));
  CHECK(std::fabs(s.eigenvalues[1].imag()) == doctest::Approx(c * k).epsilon(1e-10));
  const StationaryDensity d = stationary_density(TrigSeries(c, {}, {}), TrigSeries(b2, {}, {}), 64);
  for (double p : d.p) CHECK(p == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.flux == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("pulse-derived density and Lyapunov formulas") {
  const ReducedModel& r = fixtures::reduced_inhomogeneous();
  for (double sigma : {0.1, 1.0}) {
    const StationaryDensity d = stationary_density(r, sigma, 128);
    CHECK(d.residual <= 1e-8);
    CHECK(d.integral == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*std::min_element(d.p.begin(), d.p.end()) > 0.0);
    CHECK(d.flux_variation < 1e-9);
    const StationaryDensity fine = stationary_density(r, sigma, 256);
    for (std::size_t i = 0; i < d.p.size(); ++i) CHECK(std::fabs(fine.p[2 * i] - d.p[i]) < 1e-10);
    const LyapunovAnalytic l = lyapunov_analytic(r, sigma, d);
    CHECK(l.lambda_a < 0.0);
    CHECK(std::fabs(l.difference) <= 1e-10 * std::fabs(l.lambda_b));
    CHECK(generator_gap(r, sigma, 128).gap > 0.0);
  }
}

TEST_CASE("homogeneous noise has a uniform density") {
  const ReducedModel& r = fixtures::reduced_homogeneous();
  const StationaryDensity d = stationary_density(r, 0.1, 128);
  for (double p : d.p) CHECK(p == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("Lyapunov identity on a strongly inhomogeneous model") {
  const ReducedModel r = fixtures::synthetic_reduced(0.3);
  const StationaryDensity d = stationary_density(r, 1.0, 256);
  const LyapunovAnalytic l = lyapunov_analytic(r, 1.0, d);
  CHECK(l.lambda_b < 0.0);
  CHECK(std::fabs(l.difference) <= 1e-10 * std::fabs(l.lambda_b));
}

TEST_CASE("degenerate generators are rejected") {
  const TrigSeries drift(0.1, {}, {});
  const TrigSeries vanishing(0.5, {0.5}, {0.0});  // zero at x = 1/2
  CHECK_THROWS_AS(stationary_density(drift, vanishing, 64), DegenerateGeneratorError);
  CHECK_THROWS_AS(stationary_density(drift, TrigSeries(1.0, {}, {}), 48), ValidationError);
  CHECK_THROWS_AS(stationary_density(fixtures::synthetic_reduced(), 0.0), ValidationError);
}

}  // TEST_SUITE
