#pragma once

#include <span>
#include <vector>

namespace pulsesync::stats {

double mean(std::span<const double> x);
/// Median; entries equal to +inf count as censored beyond every finite value.
double median(std::vector<double> x);
/// Least-squares slope and intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Mean and standard error from nonoverlapping batch means.
struct BatchMeans {
  double mean = 0.0;
  double stderr_ = 0.0;
  int batches = 0;
};
BatchMeans batch_means(std::span<const double> x, int batches);

/// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

struct KsResult {
  double distance = 0.0;
  double p_value = 1.0;
};
/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace pulsesync::stats
