#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pulsesync {

/// Uniform periodic grid on [0, L) with N points. L is an integer number of
/// unit noise periods, N a power of two.
class Grid1D {
 public:
  Grid1D(int length, int points);

  int length() const noexcept { return length_; }
  int points() const noexcept { return points_; }
  double spacing() const noexcept { return spacing_; }
  double coordinate(int i) const noexcept { return spacing_ * i; }

  /// True when one unit of length is a whole number of grid cells, so that
  /// integer translations are index rolls.
  bool commensurate() const noexcept { return points_ % length_ == 0; }
  int points_per_unit() const noexcept { return points_ / length_; }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  int length_;
  int points_;
  double spacing_;
};

/// n-component real field on a grid, stored component-major.
class FieldState {
 public:
  FieldState(Grid1D grid, int components, double time = 0.0);

  const Grid1D& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  int points() const noexcept { return grid_.points(); }
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }

  std::span<double> component(int i) {
    return {data_.data() + static_cast<std::size_t>(i) * grid_.points(),
            static_cast<std::size_t>(grid_.points())};
  }
  std::span<const double> component(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * grid_.points(),
            static_cast<std::size_t>(grid_.points())};
  }
  double& at(int comp, int i) { return data_[static_cast<std::size_t>(comp) * grid_.points() + i]; }
  double at(int comp, int i) const {
    return data_[static_cast<std::size_t>(comp) * grid_.points() + i];
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::size_t size() const noexcept { return data_.size(); }

  bool all_finite() const noexcept;
  bool same_shape(const FieldState& other) const noexcept {
    return grid_ == other.grid_ && components_ == other.components_;
  }

  FieldState& operator+=(const FieldState& other);
  FieldState& operator-=(const FieldState& other);
  FieldState& operator*=(double s);

 private:
  Grid1D grid_;
  int components_;
  double time_;
  std::vector<double> data_;
};

FieldState operator+(FieldState a, const FieldState& b);
FieldState operator-(FieldState a, const FieldState& b);
FieldState operator*(double s, FieldState a);

/// Discrete L2 pairing h * sum_i sum_c a_c(x_i) b_c(x_i).
double inner(const FieldState& a, const FieldState& b);
double norm(const FieldState& a);

/// Periodic torus distance on [0, 1).
double torus_distance(double x, double y) noexcept;
/// Representative of x in [0, period).
double wrap(double x, double period = 1.0) noexcept;

}  // namespace pulsesync
