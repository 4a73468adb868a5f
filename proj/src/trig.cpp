#include "pulsesync/trig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pulsesync/errors.hpp"

namespace pulsesync {

TrigSeries::TrigSeries(int order, double mean) : mean_(mean), cos_(order), sin_(order) {
  if (order < 0) throw ValidationError("trigonometric series order must be nonnegative");
}

TrigSeries::TrigSeries(double mean, std::vector<double> cos, std::vector<double> sin)
    : mean_(mean), cos_(std::move(cos)), sin_(std::move(sin)) {
  if (cos_.size() != sin_.size())
    throw ValidationError("cosine and sine coefficient lists differ in length");
}

void TrigSeries::grow(int order) {
  if (order > this->order()) {
    cos_.resize(order, 0.0);
    sin_.resize(order, 0.0);
  }
}

double TrigSeries::operator()(double x) const {
  // Reduce to [0, 1) so that f(x) and f(x + 1) agree to the last bit.
  const double t = x - std::floor(x);
  const double th = 2.0 * std::numbers::pi * t;
  double sum = mean_;
  for (int m = 1; m <= order(); ++m) {
    const double a = cos_[m - 1], b = sin_[m - 1];
    if (a == 0.0 && b == 0.0) continue;
    sum += a * std::cos(m * th) + b * std::sin(m * th);
  }
  return sum;
}

TrigSeries TrigSeries::derivative() const {
  TrigSeries d(order());
  for (int m = 1; m <= order(); ++m) {
    const double w = 2.0 * std::numbers::pi * m;
    d.cos_[m - 1] = w * sin_[m - 1];
    d.sin_[m - 1] = -w * cos_[m - 1];
  }
  return d;
}

double TrigSeries::max_harmonic() const {
  double out = 0.0;
  for (int m = 0; m < order(); ++m) out = std::max({out, std::fabs(cos_[m]), std::fabs(sin_[m])});
  return out;
}

TrigSeries TrigSeries::trimmed() const {
  int m = order();
  while (m > 0 && cos_[m - 1] == 0.0 && sin_[m - 1] == 0.0) --m;
  return TrigSeries(mean_, {cos_.begin(), cos_.begin() + m}, {sin_.begin(), sin_.begin() + m});
}

TrigSeries& TrigSeries::operator+=(const TrigSeries& other) {
  grow(other.order());
  mean_ += other.mean_;
  for (int m = 0; m < other.order(); ++m) {
    cos_[m] += other.cos_[m];
    sin_[m] += other.sin_[m];
  }
  return *this;
}

TrigSeries& TrigSeries::operator-=(const TrigSeries& other) {
  grow(other.order());
  mean_ -= other.mean_;
  for (int m = 0; m < other.order(); ++m) {
    cos_[m] -= other.cos_[m];
    sin_[m] -= other.sin_[m];
  }
  return *this;
}

TrigSeries& TrigSeries::operator*=(double s) {
  mean_ *= s;
  for (auto& v : cos_) v *= s;
  for (auto& v : sin_) v *= s;
  return *this;
}

TrigSeries operator*(const TrigSeries& a, const TrigSeries& b) {
  // Work with complex-style index arrays over harmonics 0..M, where
  // harmonic 0 carries the mean and has no sine part.
  const int ma = a.order(), mb = b.order();
  TrigSeries out(ma + mb);
  auto ac = [&](int m) { return m == 0 ? a.mean() : a.cos_coeff(m); };
  auto as = [&](int m) { return m == 0 ? 0.0 : a.sin_coeff(m); };
  auto bc = [&](int m) { return m == 0 ? b.mean() : b.cos_coeff(m); };
  auto bs = [&](int m) { return m == 0 ? 0.0 : b.sin_coeff(m); };
  auto add = [&](int m, double c, double s) {
    // m may be negative: cos is even, sin is odd.
    if (m < 0) {
      m = -m;
      s = -s;
    }
    if (m == 0) {
      out.mean() += c;
    } else {
      out.cos_coeff(m) += c;
      out.sin_coeff(m) += s;
    }
  };
  for (int i = 0; i <= ma; ++i) {
    for (int j = 0; j <= mb; ++j) {
      const double cc = ac(i) * bc(j), ss = as(i) * bs(j);
      const double cs = ac(i) * bs(j), sc = as(i) * bc(j);
      if (cc == 0.0 && ss == 0.0 && cs == 0.0 && sc == 0.0) continue;
      // cos i cos j = (cos(i+j) + cos(i-j)) / 2
      // sin i sin j = (cos(i-j) - cos(i+j)) / 2
      // cos i sin j = (sin(i+j) - sin(i-j)) / 2
      // sin i cos j = (sin(i+j) + sin(i-j)) / 2
      add(i + j, 0.5 * (cc - ss), 0.5 * (cs + sc));
      add(i - j, 0.5 * (cc + ss), 0.5 * (sc - cs));
    }
  }
  return out;
}

}  // namespace pulsesync
