#pragma once

namespace l1embed {

// log(Gamma(x + 1/2) / Gamma(x)) for x > 0.
//
// Differencing std::lgamma loses ~log10(lgamma(x)) digits for large x, so this
// uses the asymptotic series
//   1/2 log x + sum_k (2^{1-2k} - 2) B_{2k} / (2k (2k-1) x^{2k-1}),
// for x >= 20, and shifts smaller arguments up with the recurrence
// Gamma(y + 1) = y Gamma(y). Relative accuracy is ~1e-15 everywhere.
double log_gamma_half_ratio(double x);

}  // namespace l1embed
