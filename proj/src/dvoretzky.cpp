#include "l1embed/dvoretzky.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "l1embed/errors.hpp"
#include "l1embed/special.hpp"

namespace l1embed {

MeanNorm mean_norm(const BlockShape& shape) {
  const double n = static_cast<double>(shape.num_blocks());
  const double width = static_cast<double>(shape.block_width());
  const double ambient = static_cast<double>(shape.ambient_dim());

  double value = 1.0;
  if (shape.num_blocks() > 1) {
    value = std::exp(log_gamma_half_ratio(width / 2.0) -
                     log_gamma_half_ratio(ambient / 2.0)) *
            n;
  }

  const double root_n = std::sqrt(n);
  double lower;
  double upper;
  if (shape.block_width() == 1) {
    const double gauss = std::sqrt(2.0 / std::numbers::pi) * root_n;
    lower = gauss;
    upper = shape.num_blocks() > 1 ? std::sqrt(1.0 + 1.0 / (n - 1.0)) * gauss : root_n;
  } else {
    lower = std::sqrt(1.0 - 1.0 / width) * root_n;
    upper = root_n;
  }
  return MeanNorm{shape, value, lower, upper};
}

std::size_t max_subspace_dim(const BlockShape& shape, double eps,
                             const DvoretzkyConstants& constants) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  const double c = shape.block_width() == 1 ? constants.scalar : constants.block;
  if (!(c > 0.0)) throw DomainError("Dvoretzky constants must be positive");
  const double bound = std::floor(c * eps * eps * static_cast<double>(shape.ambient_dim()));
  return static_cast<std::size_t>(bound);
}

void orthonormalize_columns(Matrix& a) {
  const std::size_t rows = a.rows();
  for (std::size_t j = 0; j < a.cols(); ++j) {
    auto v = a.col(j);
    const double original = l2_norm(v);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const auto q = a.col(i);
        const double r = detail::dot(q, v);
        for (std::size_t row = 0; row < rows; ++row) v[row] -= r * q[row];
      }
    }
    const double pivot = l2_norm(v);
    if (!(pivot >= 1e-12 * original) || pivot == 0.0) {
      throw DegenerateRandomness("column " + std::to_string(j) +
                                 " is numerically dependent on the previous ones");
    }
    double sign = 1.0;
    for (double x : v) {
      if (x != 0.0) {
        sign = x < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    const double scale = sign / pivot;
    for (double& x : v) x *= scale;
  }
}

SubspaceBasis random_subspace(const BlockShape& shape, std::size_t dim,
                              BitStream& stream, GaussianSpec spec) {
  const std::size_t rows = shape.ambient_dim();
  if (dim < 1 || dim > rows) {
    throw ShapeError("random_subspace needs 1 <= m <= nB");
  }
  const std::uint64_t needed = static_cast<std::uint64_t>(rows) * dim * spec.bits();
  if (needed > stream.remaining()) {
    throw BudgetExhausted("random_subspace", needed, stream.remaining());
  }
  Matrix a(rows, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < rows; ++i) a(i, j) = next_gaussian(stream, spec);
  }
  orthonormalize_columns(a);
  return SubspaceBasis(shape, std::move(a));
}

}  // namespace l1embed
