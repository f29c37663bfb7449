#include "l1embed/blockspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "l1embed/errors.hpp"

namespace l1embed {

BlockShape::BlockShape(std::size_t num_blocks, std::size_t block_width)
    : num_blocks_(num_blocks), block_width_(block_width) {
  if (num_blocks == 0 || block_width == 0) {
    throw ShapeError("BlockShape requires n >= 1 and B >= 1");
  }
  if (num_blocks > std::numeric_limits<std::size_t>::max() / block_width) {
    throw ShapeError("BlockShape ambient dimension overflows");
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

SubspaceBasis::SubspaceBasis(BlockShape shape, Matrix columns)
    : shape_(shape), columns_(std::move(columns)) {
  if (columns_.rows() != shape_.ambient_dim()) {
    throw ShapeError("basis has " + std::to_string(columns_.rows()) +
                     " rows, shape needs " + std::to_string(shape_.ambient_dim()));
  }
  if (columns_.cols() == 0 || columns_.cols() > columns_.rows()) {
    throw ShapeError("basis dimension must satisfy 1 <= m <= ambient_dim");
  }
}

SubspaceBasis SubspaceBasis::checked(BlockShape shape, Matrix columns, double tolerance) {
  SubspaceBasis basis(shape, std::move(columns));
  const double residual = orthonormality_residual(basis);
  if (!(residual <= tolerance)) {
    throw ShapeError("basis columns are not orthonormal (residual " +
                     std::to_string(residual) + ")");
  }
  return basis;
}

AmbientVector SubspaceBasis::combine(std::span<const double> coefficients) const {
  if (coefficients.size() != dim()) {
    throw ShapeError("coefficient vector length does not match subspace dimension");
  }
  AmbientVector x(columns_.rows(), 0.0);
  for (std::size_t j = 0; j < dim(); ++j) {
    const double a = coefficients[j];
    const auto q = columns_.col(j);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += a * q[i];
  }
  return x;
}

double orthonormality_residual(const SubspaceBasis& basis) {
  const Matrix& q = basis.columns();
  double worst = 0.0;
  for (std::size_t j = 0; j < q.cols(); ++j) {
    for (std::size_t k = j; k < q.cols(); ++k) {
      const double g = detail::dot(q.col(j), q.col(k)) - (j == k ? 1.0 : 0.0);
      worst = std::max(worst, std::abs(g));
    }
  }
  return worst;
}

namespace detail {

void CompensatedSum::add(double value) noexcept {
  const double t = sum_ + value;
  if (std::abs(sum_) >= std::abs(value)) {
    correction_ += (sum_ - t) + value;
  } else {
    correction_ += (value - t) + sum_;
  }
  sum_ = t;
}

double sum_of_squares(std::span<const double> x) noexcept {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double euclidean_norm(std::span<const double> x) noexcept {
  const double s = sum_of_squares(x);
  // Squares underflow below ~1e-154 and overflow above ~1e154; rescale then.
  if (s > 0x1p-900 && s < 0x1p+900) return std::sqrt(s);
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double t = 0.0;
  for (double v : x) {
    const double r = v / scale;
    t += r * r;
  }
  return scale * std::sqrt(t);
}

double dot(std::span<const double> x, std::span<const double> y) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace detail

double l2_norm(std::span<const double> x) noexcept {
  return detail::euclidean_norm(x);
}

double block_norm(std::span<const double> x, const BlockShape& shape) {
  if (x.size() != shape.ambient_dim()) {
    throw ShapeError("vector length " + std::to_string(x.size()) +
                     " does not match ambient dimension " +
                     std::to_string(shape.ambient_dim()));
  }
  const std::size_t width = shape.block_width();
  detail::CompensatedSum total;
  if (width == 1) {
    for (double v : x) total.add(std::abs(v));
  } else {
    for (std::size_t start = 0; start < x.size(); start += width) {
      total.add(detail::euclidean_norm(x.subspan(start, width)));
    }
  }
  return total.value();
}

double normalized_ratio(std::span<const double> x, const BlockShape& shape) {
  const double numerator = block_norm(x, shape);
  const double euclid = l2_norm(x);
  if (euclid == 0.0) throw DomainError("normalized_ratio of the zero vector");
  const double ratio =
      numerator / (std::sqrt(static_cast<double>(shape.num_blocks())) * euclid);
  // Cauchy-Schwarz bounds the exact value by 1; rounding may land one ulp above.
  return std::min(ratio, 1.0);
}

}  // namespace l1embed
