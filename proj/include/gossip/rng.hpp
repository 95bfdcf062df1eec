#pragma once

#include <array>
#include <cstdint>

namespace gossip {

/// Philox4x32-10 block function: 128-bit counter, 64-bit key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based generator addressed by (master_seed, stream, step).
///
/// Every (seed, stream, step) triple names an independent, platform-stable
/// sequence of draws; nothing is carried between steps, so trials can run in
/// any order or on any thread and still see identical numbers.
class CounterRng {
 public:
  CounterRng(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t step);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on {0, ..., bound-1}; bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

}  // namespace gossip
