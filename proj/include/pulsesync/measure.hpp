#pragma once

#include <complex>
#include <vector>

#include "pulsesync/reduction.hpp"

namespace pulsesync {

struct StationaryDensity {
  std::vector<double> x;
  std::vector<double> p;
  double residual = 0.0;        // discrete L2 norm of L* p
  double integral = 0.0;        // trapezoidal integral of p
  double flux = 0.0;            // J in sigma^2/2 (B p)' - b p = -J
  double flux_variation = 0.0;  // max |J(x) - J| / max(|J|, scale)
  double second_singular = 0.0; // relative second-smallest singular value
};

/// Stationary Fokker-Planck density on the unit torus,
///   sigma^2/2 (B p)'' - ((c + sigma^2 a) p)' = 0,  B = sum_k b_k^2,
/// as the one-dimensional nullspace of the Fourier collocation matrix.
StationaryDensity stationary_density(const ReducedModel& reduced, double sigma, int n_fp = 256);

struct LyapunovAnalytic {
  double lambda_a = 0.0;  // sigma^2 int (a' - 1/2 sum b_k'^2) p
  double lambda_b = 0.0;  // -sigma^2/2 sum_k int (b_k p)'^2 / p
  double difference = 0.0;
};

LyapunovAnalytic lyapunov_analytic(const ReducedModel& reduced, double sigma,
                                   const StationaryDensity& density);

struct GeneratorSpectrum {
  double gap = 0.0;  // -Re of the second eigenvalue
  std::vector<std::complex<double>> eigenvalues;  // sorted by decreasing real part
};

/// Eigenvalues of the collocated generator (c + sigma^2 a) d/dx + sigma^2/2 B d^2/dx^2.
GeneratorSpectrum generator_gap(const ReducedModel& reduced, double sigma, int n_fp = 256);

/// Same, for explicit drift and diffusion series (used for closed-form checks).
GeneratorSpectrum generator_gap(const TrigSeries& drift, const TrigSeries& diffusion, int n_fp);
StationaryDensity stationary_density(const TrigSeries& drift, const TrigSeries& diffusion,
                                     int n_fp);

}  // namespace pulsesync
