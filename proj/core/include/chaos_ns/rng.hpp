#pragma once

// Counter-based Philox4x32-10 generator. A stream is fully identified by
// (seed, stream id); draws are a pure function of (seed, stream, counter),
// so ensembles are reproducible regardless of scheduling.

#include <array>
#include <cstdint>

namespace chaos_ns {

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  /// Uniform in (0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal (Box-Muller, both variates of a pair are used).
  double normal() noexcept;

  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::array<std::uint32_t, 4> next_block() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept;

}  // namespace chaos_ns
