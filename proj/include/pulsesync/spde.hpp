#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pulsesync/evolve.hpp"
#include "pulsesync/noise.hpp"
#include "pulsesync/phase.hpp"
#include "pulsesync/reduction.hpp"
#include "pulsesync/rng.hpp"

namespace pulsesync {

/// One-step integrator for the Ito SPDE
///   du = (D u_xx + f(u) + sigma^2/2 sum_k alpha_k^2 g'(u) g(u) e_k^2) dt
///        + sigma g(u) sum_k alpha_k e_k d beta_k,
/// with the ETD update u <- E (u + kick) + P (f(u) + correction).
class SpdeStepper {
 public:
  SpdeStepper(ModelSpec model, NoiseSpec noise, const Grid1D& grid, double dt, double sigma);
  double dt() const noexcept { return stepper_.dt(); }
  double sigma() const noexcept { return sigma_; }
  const NoiseSpec& noise() const noexcept { return noise_; }
  /// increments[k + K] holds d beta_k for this step. Throws BlowUpError.
  void step(FieldState& u, std::span<const double> increments);

 private:
  EtdStepper stepper_;
  NoiseSpec noise_;
  double sigma_;
  std::vector<int> modes_;
  std::vector<std::vector<double>> basis_;  // alpha_k e_k per active mode
  std::vector<double> weight_;              // sum_k alpha_k^2 e_k^2
  FieldState shape_, jacobian_, drift_, kick_;
};

/// Single step with a freshly built stepper.
FieldState spde_step(const FieldState& state, const ModelSpec& model, const NoiseSpec& noise,
                     double sigma, std::span<const double> increments, double dt);

/// T_x u* for any real x: fractional part by spectral translation, integer
/// part by an index roll, so that states one noise period apart are exact rolls.
FieldState place_pulse(const FieldState& profile, double x);

/// min over integer shifts n of ||u(. + n) - v||.
double shift_discrepancy(const FieldState& u, const FieldState& v);

struct SpdeOptions {
  double dt = 0.01;
  double checkpoint = -1.0;  // negative: sigma^-2 / 100 (or 1 when sigma = 0)
  double tube_factor = 5.0;  // tube distance threshold in units of sigma
  int reduced_refine = 3;    // reduced SDE runs on dt / 2^refine
};

struct SpdeCheckpoint {
  double t = 0.0;
  double phase_u = 0.0, phase_v = 0.0;  // unwrapped lifts
  double tube_u = 0.0, tube_v = 0.0;
  double distance = 0.0;     // torus distance of the phases mod 1
  double discrepancy = 0.0;  // shift_discrepancy(u, v)
  double gamma = 0.0;        // reduced phase, reduced_vs_full only
};

struct TwoPulseReport {
  std::vector<SpdeCheckpoint> checkpoints;
  bool censored = false;
  double censor_time = std::numeric_limits<double>::infinity();
  std::string censor_reason;
  double max_tube = 0.0;
  double final_distance = 0.0;
  double initial_discrepancy = 0.0;
  double final_discrepancy = 0.0;
};

/// Two solutions from T_{x0} u* and T_{y0} u*, stepped in lockstep on one
/// increment stream (seed). Blow-up or loss of the pulse censors the run.
TwoPulseReport two_pulse_experiment(const PulseSolution& pulse, const ModelSpec& model,
                                    const NoiseSpec& noise, double sigma, double x0, double y0,
                                    double horizon, std::uint64_t seed,
                                    const SpdeOptions& options = {});

struct ComparisonReport {
  std::vector<SpdeCheckpoint> checkpoints;  // phase_u = x_hat, gamma, tube_u
  double discrete_speed = 0.0;  // deterministic pulse speed of the ETD scheme
  double max_phase_error = 0.0;
  double first_tube_exit = std::numeric_limits<double>::infinity();
  bool censored = false;
  std::string censor_reason;
};

/// Deterministic speed of the ETD discretisation, from a relaxation of u*.
double discrete_speed(const PulseSolution& pulse, const ModelSpec& model, double dt,
                      double duration = 300.0);

/// SPDE against the reduced SDE on the same Brownian path. The reduced model
/// is run with the ETD speed so that both share the deterministic drift.
ComparisonReport reduced_vs_full(const PulseSolution& pulse, const ReducedModel& reduced,
                                 const ModelSpec& model, double sigma, double x0, double horizon,
                                 std::uint64_t seed, const SpdeOptions& options = {});

}  // namespace pulsesync
