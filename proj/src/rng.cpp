#include "pulsesync/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pulsesync/errors.hpp"

namespace pulsesync {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

std::array<double, 2> normal_pair(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) {
  const auto r = philox4x32({static_cast<std::uint32_t>(index),
                             static_cast<std::uint32_t>(index >> 32), stream, 0x5eedu},
                            {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  // Uniforms on the open interval (0, 1) with 53 random bits.
  const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  return {rad * std::cos(th), rad * std::sin(th)};
}

NoisePath::NoisePath(std::uint64_t seed, int K, double fine_dt)
    : seed_(seed), K_(K), fine_dt_(fine_dt) {
  if (K < 0) throw ValidationError("noise path needs K >= 0");
  if (!(fine_dt > 0.0)) throw ValidationError("noise path step must be positive");
}

NoisePath NoisePath::shifted(long steps) const {
  if (steps < 0) throw ValidationError("noise path shift must be nonnegative");
  NoisePath p = *this;
  p.offset_ += steps << level_;
  return p;
}

NoisePath NoisePath::coarsened(int levels) const {
  if (levels < 0 || level_ + levels > 40) throw ValidationError("invalid coarsening level");
  NoisePath p = *this;
  p.level_ += levels;
  return p;
}

void NoisePath::fine_increment(long fine_step, std::span<double> out,
                               const std::vector<char>* mask) const {
  const double scale = std::sqrt(fine_dt_);
  const auto index = static_cast<std::uint64_t>(fine_step + offset_);
  auto wanted = [&](int k) { return !mask || (*mask)[k + K_]; };
  for (int k = 0; k <= K_; ++k) {
    if (!wanted(k) && !wanted(-k)) continue;
    const auto n = normal_pair(seed_, static_cast<std::uint32_t>(k), index);
    if (k == 0) {
      out[K_] += scale * n[0];
      continue;
    }
    double p = scale * n[0], m = scale * n[1];
    if (rotation_ != 0.0) {
      // R(-phi) (p, m) with phi = 2 pi k c t at the left endpoint.
      const double phi = 2.0 * std::numbers::pi * k * rotation_ *
                         (static_cast<double>(fine_step) * fine_dt_);
      const double cs = std::cos(phi), sn = std::sin(phi);
      const double rp = cs * p + sn * m;
      const double rm = -sn * p + cs * m;
      p = rp;
      m = rm;
    }
    out[K_ + k] += p;
    out[K_ - k] += m;
  }
}

void NoisePath::increments(long step, std::span<double> out) const {
  fill_increments(step, out, nullptr);
}

void NoisePath::increments(long step, std::span<double> out, const std::vector<char>& mask) const {
  if (mask.size() != out.size()) throw ValidationError("mode mask must hold 2K+1 entries");
  fill_increments(step, out, &mask);
}

void NoisePath::fill_increments(long step, std::span<double> out,
                                const std::vector<char>* mask) const {
  if (out.size() != static_cast<std::size_t>(2 * K_ + 1))
    throw ValidationError("increment buffer must hold 2K+1 entries");
  std::fill(out.begin(), out.end(), 0.0);
  const long count = 1L << level_;
  const long first = step * count;
  for (long j = 0; j < count; ++j) fine_increment(first + j, out, mask);
  if (amplitude_ != 1.0)
    for (double& v : out) v *= amplitude_;
}

NoisePath rescale_noise(const NoisePath& path, double c, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("noise rescaling needs sigma > 0");
  if (path.rotation_ != 0.0 || path.level_ != 0 || path.time_scale_ != 1.0)
    throw ValidationError("noise rescaling applies to an untransformed fine path");
  NoisePath p = path;
  p.rotation_ = c;
  p.amplitude_ = path.amplitude_ * sigma;
  p.time_scale_ = sigma * sigma;
  return p;
}

}  // namespace pulsesync
