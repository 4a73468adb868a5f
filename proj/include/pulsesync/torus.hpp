#pragma once

#include <cstdint>
#include <vector>

#include "pulsesync/reduction.hpp"
#include "pulsesync/rng.hpp"

namespace pulsesync {

/// Flattened trigonometric coefficients of a, a', the Stratonovich drift and
/// b_k, b_k' for the active noise modes, evaluated together from one table
/// of harmonics cos(2 pi m x), sin(2 pi m x).
class CoefficientTable {
 public:
  explicit CoefficientTable(const ReducedModel& reduced);

  struct Values {
    double a = 0.0, a_prime = 0.0, strat = 0.0;
    std::vector<double> b, b_prime;  // per active mode
  };

  /// Selects the rows evaluate() fills; b_k is always filled.
  enum Fields : unsigned { drift = 1, strat = 2, derivatives = 4, all = 7 };

  const std::vector<int>& modes() const noexcept { return modes_; }
  /// Mask over k + K for NoisePath::increments.
  const std::vector<char>& mask() const noexcept { return mask_; }
  int K() const noexcept { return K_; }
  void evaluate(double x, Values& out, unsigned fields = all) const;
  Values make_values() const;

 private:
  int K_ = 0;
  int order_ = 0;
  std::vector<int> modes_;
  std::vector<char> mask_;
  std::vector<double> coeffs_;  // rows of length 2 * order_ + 1
  int rows_ = 0;
  mutable std::vector<double> harmonics_;
};

/// Lifted positions on the unit torus; positions() reduces them to [0, 1).
struct TorusEnsemble {
  std::vector<double> lifts;
  std::vector<double> log_tangent;  // ell = log d gamma / d x, used when tracked
  double time = 0.0;

  explicit TorusEnsemble(std::vector<double> initial = {}, double t = 0.0);
  std::vector<double> positions() const;
};

enum class Scheme { ito_euler, stratonovich_heun };

struct SimulationOptions {
  Scheme scheme = Scheme::ito_euler;
  long stride = 1;       // record every stride steps (0: only the endpoints)
  bool tangent = false;  // integrate ell alongside the positions (Ito scheme)
};

struct Trajectory {
  std::vector<long> steps;
  std::vector<double> times;
  std::vector<std::vector<double>> lifts;    // [record][member]
  std::vector<std::vector<double>> tangent;  // [record][member] when tracked
  long order_violations = 0;                 // steps at which lift order changed
};

/// Shared-noise simulation of the reduced SDE; every member consumes the same
/// increments. `ensemble` is advanced in place. The discrete flow is a
/// cocycle: running t1 + t2 equals running t2 from the t1 state on
/// path.shifted(t1 / dt), bit for bit.
Trajectory simulate(const ReducedModel& reduced, double sigma, TorusEnsemble& ensemble,
                    const NoisePath& path, double duration, const SimulationOptions& options = {});

/// Step rule dt = 1e-2 / (1 + sigma^2 max|a| + sigma K max|b_k|), capped.
double default_dt(const ReducedModel& reduced, double sigma, double cap = 1e-3);

struct LyapunovEstimate {
  double lambda = 0.0;
  double stderr_ = 0.0;
  int batches = 0;
};

/// Time-averaged growth of ell after burn-in, with batch-means standard error.
LyapunovEstimate tangent_lyapunov_mc(const ReducedModel& reduced, double sigma, double x0,
                                     const NoisePath& path, double duration, double burn_in,
                                     int batches = 50);

struct SyncResult {
  double time = 0.0;  // +inf when censored
  bool censored = false;
  long steps = 0;
  long order_violations = 0;
};

/// First time the torus distance of two shared-noise trajectories drops below
/// threshold; censored at the horizon.
SyncResult sync_time(const ReducedModel& reduced, double sigma, double x0, double y0,
                     double threshold, const NoisePath& path, double horizon);

struct ScanRow {
  double sigma = 0.0;
  double dt = 0.0;
  double median_time = 0.0;
  int reps = 0;
  int censored = 0;
  bool unreliable = false;  // more than 20% censored
  long order_violations = 0;
  std::vector<double> times;
};

struct ScanOptions {
  double x0 = 0.0;
  double y0 = 0.3;
  double threshold = 1e-2;
  double horizon_factor = 1e4;  // horizon = factor / sigma^2
  double dt_cap = 1e-3;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  double slope = 0.0;  // of log median time against log sigma
};

ScanResult sync_scaling_scan(const ReducedModel& reduced, const std::vector<double>& sigmas,
                             int reps, const ScanOptions& options = {});

}  // namespace pulsesync
