#include "l1embed/special.hpp"

#include <cmath>

#include "l1embed/errors.hpp"

namespace l1embed {

namespace {

constexpr double kAsymptoticFrom = 20.0;

// Coefficients of x^{-1}, x^{-3}, ..., x^{-11}: (2^{1-2k} - 2) B_{2k} / (2k(2k-1)).
constexpr double kSeries[] = {
    -1.0 / 8.0,
    1.0 / 192.0,
    -1.0 / 640.0,
    17.0 / 14336.0,
    -31.0 / 18432.0,
    691.0 / 180224.0,
};

double asymptotic(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double tail = 0.0;
  for (int k = static_cast<int>(std::size(kSeries)) - 1; k >= 0; --k) {
    tail = tail * inv2 + kSeries[k];
  }
  return 0.5 * std::log(x) + tail * inv;
}

}  // namespace

double log_gamma_half_ratio(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma_half_ratio requires finite x > 0");
  }
  if (x >= kAsymptoticFrom) return asymptotic(x);
  // Gamma(x+1/2)/Gamma(x) = Gamma(y+1/2)/Gamma(y) * prod_{i<r} (x+i)/(x+i+1/2), y = x+r.
  double y = x;
  double product = 1.0;
  while (y < kAsymptoticFrom) {
    product *= y / (y + 0.5);
    y += 1.0;
  }
  return asymptotic(y) + std::log(product);
}

}  // namespace l1embed
