#include "l1embed/randbits.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "l1embed/errors.hpp"

namespace l1embed {

BitStream BitStream::from_bytes(std::span<const std::uint8_t> raw) {
  return from_bytes(raw, raw.size() * 8);
}

BitStream BitStream::from_bytes(std::span<const std::uint8_t> raw, std::size_t bit_length) {
  if (bit_length > raw.size() * 8) {
    throw DomainError("bit length exceeds the supplied bytes");
  }
  BitStream s;
  s.bytes_.assign(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>((bit_length + 7) / 8));
  s.length_ = bit_length;
  return s;
}

std::uint64_t BitStream::read(unsigned count) {
  if (count > 64) throw DomainError("cannot read more than 64 bits at once");
  if (count > remaining()) throw BudgetExhausted("bit stream", count, remaining());
  std::uint64_t value = 0;
  for (unsigned i = 0; i < count; ++i) {
    const std::size_t pos = cursor_ + i;
    const unsigned bit = (bytes_[pos / 8] >> (7 - pos % 8)) & 1u;
    value = (value << 1) | bit;
  }
  cursor_ += count;
  return value;
}

GaussianSpec::GaussianSpec(unsigned bits) : bits_(bits) {
  if (bits < kMinBits || bits > kMaxBits) {
    throw DomainError("Gaussian precision must lie in [16, 52] bits, got " +
                      std::to_string(bits));
  }
}

GaussianSpec precision_for(std::uint64_t entries, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  if (entries == 0) return GaussianSpec(GaussianSpec::kMinBits);
  const double want = std::ceil(std::log2(static_cast<double>(entries) / eps)) + 4.0;
  const double clamped = std::clamp(want, double{GaussianSpec::kMinBits},
                                    double{GaussianSpec::kMaxBits});
  return GaussianSpec(static_cast<unsigned>(clamped));
}

namespace {

template <std::size_t N>
double horner(const std::array<double, N>& c, double x) {
  double s = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) s = s * x + c[i];
  return s;
}

// AS 241 coefficients, lowest degree first.
constexpr std::array<double, 8> kCentralNum = {
    3.3871328727963666080e0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
    1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
    3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr std::array<double, 8> kCentralDen = {
    1.0, 4.2313330701600911252e+1, 6.8718700749205790830e+2,
    5.3941960214247511077e+3, 2.1213794301586595867e+4, 3.9307895800092710610e+4,
    2.8729085735721942674e+4, 5.2264952788528545610e+3};
constexpr std::array<double, 8> kNearNum = {
    1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
    3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr std::array<double, 8> kNearDen = {
    1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
    6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
    5.47593808499534494600e-4, 1.05075007164441684324e-9};
constexpr std::array<double, 8> kFarNum = {
    6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
    2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr std::array<double, 8> kFarDen = {
    1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
    1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
    1.42151175831644588870e-7, 2.04426310338993978564e-15};

}  // namespace

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("normal_quantile requires 0 < u < 1");
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(kCentralNum, r) / horner(kCentralDen, r);
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = horner(kNearNum, r) / horner(kNearDen, r);
  } else {
    r -= 5.0;
    value = horner(kFarNum, r) / horner(kFarDen, r);
  }
  return q < 0.0 ? -value : value;
}

double next_gaussian(BitStream& stream, GaussianSpec spec) {
  const unsigned t = spec.bits();
  const std::uint64_t k = stream.read(t);
  // (2k + 1) / 2^(t+1) is exact in binary64 because 2k + 1 < 2^53.
  const double u = std::ldexp(static_cast<double>(2 * k + 1), -static_cast<int>(t + 1));
  return normal_quantile(u);
}

std::uint64_t required_bits(std::uint64_t n_target, double eps, double gamma,
                            double c_univ) {
  if (n_target < 2) throw DomainError("required_bits needs N >= 2");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");
  if (!(c_univ > 0.0) || !std::isfinite(c_univ)) {
    throw DomainError("c_univ must be positive");
  }
  const double n = static_cast<double>(n_target);
  const double lead = std::max(std::pow(n, gamma), std::pow(c_univ * eps * gamma, -3.0 / gamma));
  const double bits = std::ceil(lead * std::log2(n / (eps * gamma)));
  constexpr double kLimit = 18446744073709549568.0;  // largest double below 2^64
  if (!std::isfinite(bits) || bits >= kLimit) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(bits);
}

}  // namespace l1embed
