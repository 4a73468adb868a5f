#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pulsesync/isochron.hpp"
#include "pulsesync/noise.hpp"
#include "pulsesync/pulse.hpp"
#include "pulsesync/trig.hpp"

namespace pulsesync {

/// Pairings of the pulse with the noise basis:
///   c_k = <psi . g(u*), e_k>,  d_j = <psi . g'(u*) g(u*), e_j>,
///   Q_ij = pi''(u*)[g(u*) e_i, g(u*) e_j]  for i, j in {k, -k}.
struct PairingSet {
  int K = 0;
  std::vector<double> c;  // c[k + K], |k| <= K
  std::vector<double> d;  // d[j + 2K], |j| <= 2K
  /// q[k] = {Q_kk, Q_{k,-k}, Q_{-k,-k}} for k >= 1; q[0][0] = Q_00.
  std::vector<std::array<double, 3>> q;
  double psi_g_norm2 = 0.0;  // ||psi . g(u*)||^2
  double q_eps = 0.0;        // finite-difference step used for Q

  double c_at(int k) const { return c.at(static_cast<std::size_t>(k + K)); }
  double d_at(int j) const { return d.at(static_cast<std::size_t>(j + 2 * K)); }
};

/// Trapezoidal pairings c_k and d_j; Q is left zero.
PairingSet fourier_pairings(const PulseSolution& pulse, const ModelSpec& model, int K);

/// Fills the Q entries by polarised second differences of the isochron map.
/// Modes for which `skip(k)` is true are left zero. Modes run in parallel.
void q_matrix(PairingSet& pairings, const IsochronMap& isochron, const ModelSpec& model,
              double eps = 1e-3, const std::function<bool(int)>& skip = {});

/// b_k for |k| <= K, indexed k + K.
std::vector<TrigSeries> build_b(const NoiseSpec& noise, const PairingSet& pairings);
TrigSeries build_a(const NoiseSpec& noise, const PairingSet& pairings);

struct NondegeneracyReport {
  bool passed = false;
  std::string reason;
  double c_norm2 = 0.0;     // c_1^2 + c_{-1}^2
  double threshold = 0.0;
  double min_b_norm2 = 0.0;  // min_x b_1(x)^2 + b_{-1}(x)^2
};

NondegeneracyReport nondegeneracy_check(const NoiseSpec& noise, const PairingSet& pairings);

/// Phase-reduced SDE on the torus,
///   d gamma = (c + sigma^2 a(gamma)) dt + sigma sum_k b_k(gamma) d beta_k  (Ito).
struct ReducedModel {
  double speed = 0.0;
  NoiseSpec noise;
  PairingSet pairings;
  TrigSeries a, a_prime;
  std::vector<TrigSeries> b, b_prime;  // indexed k + K
  TrigSeries strat;                    // a - 1/2 sum_k b_k' b_k

  const TrigSeries& b_at(int k) const { return b.at(static_cast<std::size_t>(k + noise.K)); }
  const TrigSeries& b_prime_at(int k) const {
    return b_prime.at(static_cast<std::size_t>(k + noise.K));
  }
};

ReducedModel build_reduced(double speed, const NoiseSpec& noise, const PairingSet& pairings);
TrigSeries strat_drift(const ReducedModel& reduced);
/// sum_k b_k^2 as a series.
TrigSeries b_square_sum(const ReducedModel& reduced);

/// Coefficients straight from their definition at T_x u*, with no
/// trigonometric shortcut: b_k(x) by a central difference of pi along
/// g(T_x u*) e_k, a(x) from second differences of
///   s -> pi(T_x u* + s g e_k + s^2/2 g'g e_k^2).
struct DirectCoefficients {
  double a = 0.0;
  std::vector<double> b;  // indexed k + K
};
DirectCoefficients direct_coefficients(const IsochronMap& isochron, const ModelSpec& model,
                                       const NoiseSpec& noise, double x, double eps = 1e-3);

/// Structured text document (JSON), bit-exact at full precision.
void write_reduced(std::ostream& os, const ReducedModel& reduced);
void write_reduced(const std::filesystem::path& path, const ReducedModel& reduced);
ReducedModel read_reduced(std::istream& is);
ReducedModel read_reduced(const std::filesystem::path& path);

}  // namespace pulsesync
