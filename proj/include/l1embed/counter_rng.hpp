#pragma once

// Counter-based generator for exploratory (non-budgeted) randomness.
//
// Philox4x32-10 (Salmon et al., SC'11). Stream `s` under key `k` is the
// sequence Philox(counter = {block_lo, block_hi, s_lo, s_hi}, key = {k_lo, k_hi})
// for block = 0, 1, 2, ... Every estimator derives its randomness from
// (key, task index), so results do not depend on scheduling.

#include <array>
#include <cstdint>

namespace l1embed {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

// Standard normals from one keyed stream. Each 64-bit half of a Philox output
// gives u = (top 52 bits + 0.5) / 2^52, mapped through normal_quantile.
class KeyedNormals {
 public:
  KeyedNormals(std::uint64_t key, std::uint64_t stream) noexcept;

  double operator()();

 private:
  PhiloxKey key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace l1embed
