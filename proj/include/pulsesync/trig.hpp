#pragma once

#include <vector>

namespace pulsesync {

/// Finite Fourier series of period 1:
///   f(x) = mean + sum_{m=1}^{M} a_m cos(2 pi m x) + b_m sin(2 pi m x).
class TrigSeries {
 public:
  TrigSeries() = default;
  explicit TrigSeries(int order, double mean = 0.0);
  TrigSeries(double mean, std::vector<double> cos, std::vector<double> sin);

  int order() const noexcept { return static_cast<int>(cos_.size()); }
  double mean() const noexcept { return mean_; }
  double& mean() noexcept { return mean_; }
  double cos_coeff(int m) const { return m <= order() ? cos_[m - 1] : 0.0; }
  double sin_coeff(int m) const { return m <= order() ? sin_[m - 1] : 0.0; }
  double& cos_coeff(int m) { return cos_.at(m - 1); }
  double& sin_coeff(int m) { return sin_.at(m - 1); }
  const std::vector<double>& cos_coeffs() const noexcept { return cos_; }
  const std::vector<double>& sin_coeffs() const noexcept { return sin_; }

  double operator()(double x) const;
  TrigSeries derivative() const;
  /// Largest harmonic coefficient magnitude (mean excluded).
  double max_harmonic() const;
  /// Drops trailing zero harmonics.
  TrigSeries trimmed() const;

  TrigSeries& operator+=(const TrigSeries& other);
  TrigSeries& operator-=(const TrigSeries& other);
  TrigSeries& operator*=(double s);

  friend TrigSeries operator+(TrigSeries a, const TrigSeries& b) { return a += b; }
  friend TrigSeries operator-(TrigSeries a, const TrigSeries& b) { return a -= b; }
  friend TrigSeries operator*(double s, TrigSeries a) { return a *= s; }
  /// Exact product via the product-to-sum identities.
  friend TrigSeries operator*(const TrigSeries& a, const TrigSeries& b);
  friend bool operator==(const TrigSeries&, const TrigSeries&) = default;

 private:
  void grow(int order);

  double mean_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

}  // namespace pulsesync
