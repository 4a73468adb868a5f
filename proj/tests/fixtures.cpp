#include "fixtures.hpp"

namespace fixtures {

using namespace pulsesync;

ModelSpec fhn(double constant, double linear) {
  return fitzhugh_nagumo({}, {constant, linear});
}

const PulseSolution& pulse() {
  static const PulseSolution p = [] {
    const ModelSpec m = fhn();
    const auto [guess, speed] = simulated_pulse_guess(m, Grid1D(16, 512));
    return find_pulse(m, guess, speed);
  }();
  return p;
}

const IsochronMap& isochron() {
  static const IsochronMap map(pulse(), fhn());
  return map;
}

namespace {

ReducedModel reduce(const ModelSpec& model, const NoiseSpec& noise) {
  PairingSet pr = fourier_pairings(pulse(), model, noise.K);
  q_matrix(pr, isochron(), model, 1e-3);
  return build_reduced(pulse().speed, noise, pr);
}

}  // namespace

const ReducedModel& reduced_inhomogeneous() {
  static const ReducedModel r = reduce(fhn(1.0, 0.5), NoiseSpec(1, {0.5, 0.3, 1.0}, 0.1));
  return r;
}

const ReducedModel& reduced_homogeneous() {
  static const ReducedModel r = reduce(fhn(), NoiseSpec(1, {1.0, 0.0, 1.0}, 0.1));
  return r;
}

ReducedModel synthetic_reduced(double speed) {
  PairingSet pr;
  pr.K = 1;
  pr.c = {0.2, 0.5, 1.0};
  pr.d = {0.1, -0.2, 0.3, 0.4, -0.1};
  pr.q = {{-0.5, 0.0, 0.0}, {-0.3, 0.1, -0.2}};
  pr.psi_g_norm2 = 1.0;
  return build_reduced(speed, NoiseSpec(1, {0.3, 0.5, 1.0}, 1.0), pr);
}

}  // namespace fixtures
