#include "pulsesync/squeeze.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pulsesync/errors.hpp"

namespace pulsesync {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

/// Integral of k over [0, t].
double gain_integral(double t) {
  const double whole = std::floor(t);
  double acc = 0.0;
  for (int i = 0; i < static_cast<int>(whole) && i < 5; ++i) acc += (i % 2 == 0) ? 1.0 : -1.0;
  if (whole < 5) acc += (t - whole) * squeeze_gain_sign(t);
  return acc;
}

/// Exact solution on an interval with constant target z: tan(pi (gamma - z))
/// decays like exp(-2 pi L int k). Lifted so that gamma stays within 1/2 of z.
double closed_form(double x, double z, double decay) {
  const double off = x - z;
  const double base = std::round(off);  // the unstable point z + 1/2 is never crossed
  const double t = std::tan(std::numbers::pi * (off - base)) * decay;
  return z + base + std::atan(t) / std::numbers::pi;
}

}  // namespace

double squeeze_gain_sign(double t) {
  if (t < 0.0 || t > 5.0) return 0.0;
  const int i = std::min(4, static_cast<int>(std::floor(t)));
  return (i % 2 == 0) ? 1.0 : -1.0;
}

double squeeze_target(double t, const std::array<double, 3>& z) {
  if (t < 2.0) return z[0];
  if (t < 4.0) return z[1];
  return z[2];
}

SqueezeReport controlled_squeeze(double gain, const SqueezeOptions& o) {
  if (!(gain >= 0.0)) throw ValidationError("squeeze gain must be nonnegative");
  if (o.steps_per_unit < 1 || o.record_stride < 1)
    throw ValidationError("squeeze step counts must be positive");
  const auto& z = o.targets;

  SqueezeReport r;
  r.gain = gain;
  r.initial = {z[0], z[1], z[2]};
  r.initial.insert(r.initial.end(), o.extra_points.begin(), o.extra_points.end());
  const std::size_t m = r.initial.size();

  std::vector<double> g = r.initial;
  const double h = 1.0 / o.steps_per_unit;
  std::vector<std::vector<double>> at_unit(6);
  at_unit[0] = g;
  r.times.push_back(0.0);
  r.paths.push_back(g);

  // Each unit interval has constant k and eta, so RK4 stages never straddle a switch.
  for (int unit = 0; unit < 5; ++unit) {
    const double k = (unit % 2 == 0) ? 1.0 : -1.0;
    const double eta = two_pi * squeeze_target(unit + 0.5, z);
    auto rhs = [&](double x) { return -k * gain * std::sin(two_pi * x - eta); };
    for (int s = 1; s <= o.steps_per_unit; ++s) {
      for (double& x : g) {
        const double k1 = rhs(x);
        const double k2 = rhs(x + 0.5 * h * k1);
        const double k3 = rhs(x + 0.5 * h * k2);
        const double k4 = rhs(x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      if (s % o.record_stride == 0 || s == o.steps_per_unit) {
        r.times.push_back(unit + s * h);
        r.paths.push_back(g);
      }
    }
    at_unit[unit + 1] = g;
  }

  for (std::size_t i = 0; i < m; ++i) {
    r.reversal_error_2 = std::max(r.reversal_error_2, std::fabs(at_unit[2][i] - at_unit[0][i]));
    r.reversal_error_4 = std::max(r.reversal_error_4, std::fabs(at_unit[4][i] - at_unit[0][i]));
    for (int unit : {1, 3, 5}) {
      // The state at the start of each forward interval is the initial point.
      const double zt = squeeze_target(unit - 0.5, z);
      const double decay = std::exp(-two_pi * gain * (gain_integral(unit) - gain_integral(unit - 1)));
      const double exact = closed_form(r.initial[i], zt, decay);
      r.closed_form_error = std::max(r.closed_form_error, std::fabs(at_unit[unit][i] - exact));
    }
  }

  // Pairs of points squeezed at t = 1, 3, 5, written as (lower, upper, target).
  const std::array<std::array<double, 3>, 3> pairs{{
      {at_unit[1][2], at_unit[1][1], z[0]},
      {at_unit[3][0], at_unit[3][2] + 1.0, z[1]},
      {at_unit[5][1] - 1.0, at_unit[5][0], z[2]},
  }};
  for (int j = 0; j < 3; ++j) {
    const auto [lo, hi, target] = pairs[j];
    r.spread[j] = hi - lo;
    r.worst_offset[j] = std::max(std::fabs(lo - target), std::fabs(hi - target));
    r.holds[j] = target - o.epsilon <= lo && lo < hi && hi <= target + o.epsilon;
  }
  return r;
}

SqueezeReport controlled_squeeze(const ReducedModel& reduced, double sigma, double gain,
                                 const SqueezeOptions& options) {
  if (!(sigma > 0.0)) throw ValidationError("squeeze demo needs sigma > 0");
  SqueezeReport r = controlled_squeeze(gain, options);
  r.nondegenerate = nondegeneracy_check(reduced.noise, reduced.pairings).passed;
  return r;
}

}  // namespace pulsesync
