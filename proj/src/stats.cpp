#include "pulsesync/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pulsesync/errors.hpp"

namespace pulsesync::stats {

double mean(std::span<const double> x) {
  if (x.empty()) throw ValidationError("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double median(std::vector<double> x) {
  if (x.empty()) throw ValidationError("median of an empty sample");
  const std::size_t n = x.size();
  std::sort(x.begin(), x.end());
  if (n % 2 == 1) return x[n / 2];
  const double lo = x[n / 2 - 1], hi = x[n / 2];
  if (std::isinf(hi)) return hi;
  return 0.5 * (lo + hi);
}

LineFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("line fit needs >= 2 points");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw ValidationError("line fit with identical abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

BatchMeans batch_means(std::span<const double> x, int batches) {
  if (batches < 2) throw ValidationError("batch means need at least two batches");
  const std::size_t len = x.size() / batches;
  if (len == 0) throw ValidationError("fewer samples than batches");
  std::vector<double> m(batches);
  for (int b = 0; b < batches; ++b) m[b] = mean(x.subspan(b * len, len));
  BatchMeans out;
  out.batches = batches;
  out.mean = mean(m);
  double ss = 0.0;
  for (double v : m) ss += (v - out.mean) * (v - out.mean);
  out.stderr_ = std::sqrt(ss / (batches - 1) / batches);
  return out;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges slowly; Q is 1 to double precision
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ValidationError("KS test needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  KsResult r;
  r.distance = d;
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
  return r;
}

}  // namespace pulsesync::stats
