#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace pulsesync {

/// Philox4x32-10 block function (Salmon et al., counter-based).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Two independent standard normals keyed by (seed, stream, index).
std::array<double, 2> normal_pair(std::uint64_t seed, std::uint32_t stream, std::uint64_t index);

/// Brownian increments for the modes |k| <= K, generated on demand from
/// (seed, |k|, fine step). Regenerating any slice is bit-identical.
///
/// A path is a view of the fine stream with, in order of application:
///   - a step offset (the shift theta),
///   - an optional rotation R(-2 pi k c t) of each pair (d beta_k, d beta_-k),
///     evaluated at the fine step's left endpoint,
///   - aggregation of 2^level fine steps into one step,
///   - an amplitude factor on the increments and a factor on the step size.
class NoisePath {
 public:
  NoisePath(std::uint64_t seed, int K, double fine_dt);

  std::uint64_t seed() const noexcept { return seed_; }
  int K() const noexcept { return K_; }
  double dt() const noexcept { return fine_dt_ * static_cast<double>(1L << level_) * time_scale_; }
  double fine_dt() const noexcept { return fine_dt_; }
  int level() const noexcept { return level_; }
  long offset() const noexcept { return offset_; }
  double amplitude() const noexcept { return amplitude_; }
  double rotation_speed() const noexcept { return rotation_; }

  /// Path started `steps` (coarse) steps later.
  NoisePath shifted(long steps) const;
  /// Path whose steps aggregate 2^levels of the current steps.
  NoisePath coarsened(int levels) const;

  /// Fills out[k + K] with the increments of step `step`.
  void increments(long step, std::span<double> out) const;
  /// Skips pairs (k, -k) whose mask entries (index k + K) are both false;
  /// they are left zero.
  void increments(long step, std::span<double> out, const std::vector<char>& mask) const;

  friend NoisePath rescale_noise(const NoisePath& path, double c, double sigma);

 private:
  void fill_increments(long step, std::span<double> out, const std::vector<char>* mask) const;
  void fine_increment(long fine_step, std::span<double> out, const std::vector<char>* mask) const;

  std::uint64_t seed_;
  int K_;
  double fine_dt_;
  int level_ = 0;
  long offset_ = 0;  // in fine steps
  double rotation_ = 0.0;
  double amplitude_ = 1.0;
  double time_scale_ = 1.0;
};

/// Time-change map: rotates each pair (beta_k, beta_-k), k >= 1, by
/// R(-2 pi k c t) and rescales beta -> sigma beta(sigma^-2 .), so the new
/// step is sigma^2 dt and increments carry the factor sigma. beta_0 is
/// passed through unrotated.
NoisePath rescale_noise(const NoisePath& path, double c, double sigma);

}  // namespace pulsesync
