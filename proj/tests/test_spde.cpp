#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "pulsesync/errors.hpp"
#include "pulsesync/evolve.hpp"
#include "pulsesync/phase.hpp"
#include "pulsesync/rng.hpp"
#include "pulsesync/spde.hpp"

using namespace pulsesync;

namespace {

double max_abs_diff(const FieldState& a, const FieldState& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.values()[i] - b.values()[i]));
  return m;
}

FieldState run_spde(const ModelSpec& model, const NoiseSpec& noise, double sigma,
                    const NoisePath& path, double duration) {
  const auto& p = fixtures::pulse();
  SpdeStepper stepper(model, noise, p.profile.grid(), path.dt(), sigma);
  FieldState u = p.profile;
  std::vector<double> inc(2 * noise.K + 1);
  const long steps = step_count(duration, path.dt());
  for (long s = 0; s < steps; ++s) {
    path.increments(s, inc);
    stepper.step(u, inc);
  }
  return u;
}

}  // namespace

TEST_SUITE("spde") {

TEST_CASE("zero amplitude reproduces the deterministic scheme exactly") {
  const auto& p = fixtures::pulse();
  const ModelSpec m = fixtures::fhn();
  const NoiseSpec noise(1, {1.0, 0.0, 1.0}, 0.1);
  const NoisePath path(5, 1, 0.01);
  const FieldState a = run_spde(m, noise, 0.0, path, 2.0);
  const FieldState b = evolve_pde(p.profile, m, 2.0, 0.01);
  CHECK(max_abs_diff(a, b) == 0.0);
  const FieldState c = run_spde(fixtures::fhn(0.0, 0.0), noise, 0.3, path, 2.0);
  CHECK(max_abs_diff(c, b) == 0.0);
}

TEST_CASE("stepping is deterministic and equals the one-shot helper") {
  const auto& p = fixtures::pulse();
  const ModelSpec m = fixtures::fhn(0.0, 1.0);
  const NoiseSpec noise(1, {0.8, 0.0, 0.8}, 0.1);
  const NoisePath path(9, 1, 0.01);
  const FieldState a = run_spde(m, noise, 0.1, path, 1.0);
  const FieldState b = run_spde(m, noise, 0.1, path, 1.0);
  CHECK(max_abs_diff(a, b) == 0.0);
  std::vector<double> inc(3);
  path.increments(0, inc);
  SpdeStepper stepper(m, noise, p.profile.grid(), 0.01, 0.1);
  FieldState u = p.profile;
  stepper.step(u, inc);
  CHECK(max_abs_diff(u, spde_step(p.profile, m, noise, 0.1, inc, 0.01)) == 0.0);
  CHECK_THROWS_AS(SpdeStepper(m, noise, p.profile.grid(), 0.01, -1.0), ValidationError);
}

TEST_CASE("placing pulses") {
  const auto& p = fixtures::pulse();
  CHECK(max_abs_diff(place_pulse(p.profile, 0.0), p.profile) == 0.0);
  CHECK(max_abs_diff(place_pulse(p.profile, 2.0), roll(p.profile, 64)) == 0.0);
  const FieldState shifted = place_pulse(p.profile, 3.3);
  CHECK(phase_fit(shifted, p).phase == doctest::Approx(3.3).epsilon(1e-8));
  CHECK(shift_discrepancy(place_pulse(p.profile, 0.4), place_pulse(p.profile, 1.4)) < 1e-12);
  CHECK(shift_discrepancy(place_pulse(p.profile, 0.0), place_pulse(p.profile, 0.5)) > 0.1);
}

TEST_CASE("pulses one period apart stay exact translates") {
  const auto& p = fixtures::pulse();
  SpdeOptions o;
  o.checkpoint = 1.0;
  const TwoPulseReport r = two_pulse_experiment(p, fixtures::fhn(0.0, 1.0),
                                                NoiseSpec(1, {0.8, 0.0, 0.8}, 0.1), 0.1, 0.2, 1.2,
                                                4.0, 3, o);
  REQUIRE_FALSE(r.censored);
  CHECK(r.initial_discrepancy < 1e-12);
  CHECK(r.final_discrepancy < 1e-10);
  const TwoPulseReport same = two_pulse_experiment(p, fixtures::fhn(0.0, 1.0),
                                                   NoiseSpec(1, {0.8, 0.0, 0.8}, 0.1), 0.1, 0.7,
                                                   0.7, 2.0, 3, o);
  CHECK(same.final_distance == 0.0);
  CHECK(same.final_discrepancy == 0.0);
}

TEST_CASE("strong convergence in the step size") {
  const ModelSpec m = fixtures::fhn(0.0, 1.0);
  const NoiseSpec noise(1, {0.8, 0.0, 0.8}, 0.1);
  const NoisePath fine(21, 1, 0.01 / 16);
  const FieldState ref = run_spde(m, noise, 0.3, fine, 1.0);
  std::vector<double> err;
  for (int level : {4, 3, 2}) err.push_back(max_abs_diff(run_spde(m, noise, 0.3, fine.coarsened(level), 1.0), ref));
  CHECK(err[1] < err[0]);
  CHECK(err[2] < err[1]);
  CHECK(std::log2(err[0] / err[2]) / 2.0 >= 0.5);
}

TEST_CASE("violent noise is censored, not thrown") {
  const auto& p = fixtures::pulse();
  SpdeOptions o;
  o.checkpoint = 0.5;
  const TwoPulseReport r = two_pulse_experiment(p, fixtures::fhn(), NoiseSpec(1, {1.0, 0.0, 1.0}, 0.1),
                                                50.0, 0.0, 0.3, 10.0, 1, o);
  CHECK(r.censored);
  CHECK(r.censor_time == doctest::Approx(0.12));
  CHECK_FALSE(r.censor_reason.empty());
}

TEST_CASE("without noise the reduced phase tracks the full system") {
  const auto& r = fixtures::reduced_homogeneous();
  SpdeOptions o;
  o.checkpoint = 5.0;
  const ComparisonReport c = reduced_vs_full(fixtures::pulse(), r, fixtures::fhn(), 0.0, 0.25, 20.0, 1, o);
  CHECK_FALSE(c.censored);
  CHECK(c.max_phase_error <= 2e-3);
  CHECK(c.discrete_speed == doctest::Approx(fixtures::pulse().speed).epsilon(2e-2));
  CHECK(std::isinf(c.first_tube_exit));
}

}  // TEST_SUITE
