#pragma once

#include <cstdint>

namespace ecsim {

/// SplitMix64 — the 64-bit mixing generator of Steele, Lea & Burman (the
/// java.util.SplittableRandom finalizer). Chosen for reproducibility: the
/// whole algorithm is ~6 lines, has no state beyond one word, and the same
/// seed yields the same stream on every platform. Not cryptographic.
///
///   state += 0x9E3779B97F4A7C15              (golden-ratio increment)
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  std::uint64_t state() const { return state_; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Decorrelated per-stream seed for trial k of a run: trials can be drawn in
/// any order (or in parallel) and still reproduce bit-identical results.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
  return SplitMix64::mix(master_seed + (stream_index + 1) * SplitMix64::kGamma);
}

}  // namespace ecsim
