#pragma once

// Vectors, bases and norms of the block space l1^n(l2^B).
//
// A vector of a BlockShape{n, B} has n*B coordinates laid out block-major:
// block i occupies [i*B, (i+1)*B). The block norm is the sum of the Euclidean
// norms of the blocks; B = 1 gives the plain l1 norm.

#include <cstddef>
#include <span>
#include <vector>

namespace l1embed {

class BlockShape {
 public:
  // Throws ShapeError when either factor is zero or n*B overflows.
  BlockShape(std::size_t num_blocks, std::size_t block_width);

  std::size_t num_blocks() const noexcept { return num_blocks_; }
  std::size_t block_width() const noexcept { return block_width_; }
  std::size_t ambient_dim() const noexcept { return num_blocks_ * block_width_; }

  friend bool operator==(const BlockShape&, const BlockShape&) = default;

 private:
  std::size_t num_blocks_;
  std::size_t block_width_;
};

using AmbientVector = std::vector<double>;

// Dense column-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline constexpr double kOrthonormalityTolerance = 1e-10;

// An m-dimensional subspace of l1^n(l2^B), given by an ambient_dim x m matrix
// whose columns are expected to be orthonormal.
class SubspaceBasis {
 public:
  // Checks dimensions only (rows == ambient_dim, 1 <= m <= ambient_dim).
  SubspaceBasis(BlockShape shape, Matrix columns);

  // Additionally requires orthonormality_residual <= tolerance.
  static SubspaceBasis checked(BlockShape shape, Matrix columns,
                               double tolerance = kOrthonormalityTolerance);

  const BlockShape& shape() const noexcept { return shape_; }
  std::size_t dim() const noexcept { return columns_.cols(); }
  const Matrix& columns() const noexcept { return columns_; }

  // Q * coefficients.
  AmbientVector combine(std::span<const double> coefficients) const;

  friend bool operator==(const SubspaceBasis&, const SubspaceBasis&) = default;

 private:
  BlockShape shape_;
  Matrix columns_;
};

// max |(Q^T Q - I)_{jk}|.
double orthonormality_residual(const SubspaceBasis& basis);

double l2_norm(std::span<const double> x) noexcept;

// Sum of block Euclidean norms, accumulated with Kahan compensation.
double block_norm(std::span<const double> x, const BlockShape& shape);

// block_norm(x) / (sqrt(n) * |x|_2), the normalized-measure L1/L2 ratio.
// Lies in (0, 1]; throws DomainError for x = 0.
double normalized_ratio(std::span<const double> x, const BlockShape& shape);

namespace detail {

// Running sum with Kahan-Babuska (Neumaier) compensation.
class CompensatedSum {
 public:
  void add(double value) noexcept;
  double value() const noexcept { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

double sum_of_squares(std::span<const double> x) noexcept;
// sqrt(sum_of_squares), rescaled when the squares would underflow or overflow.
double euclidean_norm(std::span<const double> x) noexcept;
double dot(std::span<const double> x, std::span<const double> y) noexcept;

}  // namespace detail

}  // namespace l1embed
