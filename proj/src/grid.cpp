#include "pulsesync/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pulsesync/errors.hpp"

namespace pulsesync {

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid1D::Grid1D(int length, int points) : length_(length), points_(points) {
  if (length <= 0) throw ValidationError("grid length must be a positive integer");
  if (points < 4 || !is_power_of_two(points))
    throw ValidationError("grid point count must be a power of two >= 4, got " +
                          std::to_string(points));
  spacing_ = static_cast<double>(length) / points;
}

FieldState::FieldState(Grid1D grid, int components, double time)
    : grid_(grid), components_(components), time_(time) {
  if (components <= 0) throw ValidationError("field needs at least one component");
  data_.assign(static_cast<std::size_t>(components) * grid.points(), 0.0);
}

bool FieldState::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

FieldState& FieldState::operator+=(const FieldState& other) {
  if (!same_shape(other)) throw ValidationError("field shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

FieldState& FieldState::operator-=(const FieldState& other) {
  if (!same_shape(other)) throw ValidationError("field shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

FieldState& FieldState::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

FieldState operator+(FieldState a, const FieldState& b) { return a += b; }
FieldState operator-(FieldState a, const FieldState& b) { return a -= b; }
FieldState operator*(double s, FieldState a) { return a *= s; }

double inner(const FieldState& a, const FieldState& b) {
  if (!a.same_shape(b)) throw ValidationError("field shape mismatch in inner product");
  const auto x = a.values();
  const auto y = b.values();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s * a.grid().spacing();
}

double norm(const FieldState& a) { return std::sqrt(inner(a, a)); }

double wrap(double x, double period) noexcept {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

double torus_distance(double x, double y) noexcept {
  const double d = std::fabs(wrap(x) - wrap(y));
  return std::min(d, 1.0 - d);
}

}  // namespace pulsesync
