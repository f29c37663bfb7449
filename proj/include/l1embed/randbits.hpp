#pragma once

// Budgeted randomness: a finite bit string turned into discretized Gaussians.
//
// Every Gaussian consumes exactly `t` raw bits, read MSB-first. The bits are
// used as-is; nothing on this path stretches or whitens them.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace l1embed {

class BitStream {
 public:
  BitStream() = default;

  // All bits of `raw`, most significant bit of each byte first.
  static BitStream from_bytes(std::span<const std::uint8_t> raw);
  // Only the first `bit_length` bits of `raw` (bit_length <= 8 * raw.size()).
  static BitStream from_bytes(std::span<const std::uint8_t> raw, std::size_t bit_length);

  std::size_t size_bits() const noexcept { return length_; }
  std::size_t consumed() const noexcept { return cursor_; }
  std::size_t remaining() const noexcept { return length_ - cursor_; }

  // Reads `count` (<= 64) bits as a big-endian unsigned integer. Throws
  // BudgetExhausted, leaving the cursor untouched, when fewer remain.
  std::uint64_t read(unsigned count);

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t length_ = 0;
  std::size_t cursor_ = 0;
};

// Bits per discretized Gaussian, 16 <= t <= 52.
class GaussianSpec {
 public:
  static constexpr unsigned kMinBits = 16;
  static constexpr unsigned kMaxBits = 52;

  explicit GaussianSpec(unsigned bits);
  unsigned bits() const noexcept { return bits_; }

  friend bool operator==(const GaussianSpec&, const GaussianSpec&) = default;

 private:
  unsigned bits_;
};

// t = clamp(ceil(log2(entries / eps)) + 4, 16, 52), where `entries` is the
// number of Gaussian entries of the matrix being generated.
GaussianSpec precision_for(std::uint64_t entries, double eps);

/// Inverse standard normal CDF.
///
/// Wichura's algorithm AS 241 (PPND16, Applied Statistics 37, 1988): a rational
/// approximation of degree 7/7 on |u - 0.5| <= 0.425 and two tail pieces in
/// r = sqrt(-log(min(u, 1-u))). Relative error is about 1e-16. Polynomials are
/// evaluated by Horner from the highest coefficient; the result depends only on
/// IEEE add/mul/div, std::sqrt and std::log, so it is reproducible wherever
/// std::log is.
///
/// Requires 0 < u < 1; throws DomainError otherwise.
double normal_quantile(double u);

// Reads t bits as k, returns normal_quantile((k + 0.5) / 2^t).
double next_gaussian(BitStream& stream, GaussianSpec spec);

// ceil(max{N^gamma, (c_univ*eps*gamma)^(-3/gamma)} * log2(N/(eps*gamma))).
// Requires N >= 2, eps in (0, 1), gamma in (0, 1], c_univ > 0.
// Saturates at UINT64_MAX when the value does not fit.
std::uint64_t required_bits(std::uint64_t n_target, double eps, double gamma,
                            double c_univ);

}  // namespace l1embed
