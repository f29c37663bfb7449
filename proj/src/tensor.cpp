#include "l1embed/tensor.hpp"

#include <limits>
#include <optional>
#include <string>

#include "l1embed/detail/parallel.hpp"
#include "l1embed/errors.hpp"

namespace l1embed {

namespace {

std::optional<std::size_t> checked_mul(std::size_t a, std::size_t b) {
  std::size_t out;
  if (__builtin_mul_overflow(a, b, &out)) return std::nullopt;
  return out;
}

BlockShape product_shape(const BlockShape& left, const BlockShape& right) {
  const auto blocks = checked_mul(left.num_blocks(), right.num_blocks());
  const auto width = checked_mul(left.block_width(), right.block_width());
  if (!blocks || !width) throw CapacityError("tensor product shape overflows");
  return BlockShape(*blocks, *width);
}

// Writes x (x) y into `out`, which has the product layout.
void kron_into(std::span<const double> x, const BlockShape& xs, std::span<const double> y,
               const BlockShape& ys, std::span<double> out) {
  const std::size_t n2 = ys.num_blocks();
  const std::size_t w1 = xs.block_width();
  const std::size_t w2 = ys.block_width();
  const std::size_t w = w1 * w2;
  for (std::size_t i1 = 0; i1 < xs.num_blocks(); ++i1) {
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      double* block = out.data() + (i1 * n2 + i2) * w;
      for (std::size_t b1 = 0; b1 < w1; ++b1) {
        const double xv = x[i1 * w1 + b1];
        const double* yb = y.data() + i2 * w2;
        for (std::size_t b2 = 0; b2 < w2; ++b2) block[b1 * w2 + b2] = xv * yb[b2];
      }
    }
  }
}

}  // namespace

BlockShape TensorLayout::product() const { return product_shape(left, right); }

std::size_t TensorLayout::product_index(std::size_t raw) const {
  const std::size_t right_dim = right.ambient_dim();
  const std::size_t left_coord = raw / right_dim;
  const std::size_t right_coord = raw % right_dim;
  const std::size_t i1 = left_coord / left.block_width();
  const std::size_t b1 = left_coord % left.block_width();
  const std::size_t i2 = right_coord / right.block_width();
  const std::size_t b2 = right_coord % right.block_width();
  const std::size_t block = i1 * right.num_blocks() + i2;
  return block * (left.block_width() * right.block_width()) + b1 * right.block_width() + b2;
}

std::vector<double> flatten_coefficients(const CoefficientMatrix& t) {
  std::vector<double> out;
  out.reserve(t.rows() * t.cols());
  for (std::size_t j = 0; j < t.rows(); ++j) {
    for (std::size_t k = 0; k < t.cols(); ++k) out.push_back(t(j, k));
  }
  return out;
}

AmbientVector tensor_vectors(std::span<const double> x, const BlockShape& x_shape,
                             std::span<const double> y, const BlockShape& y_shape) {
  if (x.size() != x_shape.ambient_dim() || y.size() != y_shape.ambient_dim()) {
    throw ShapeError("tensor_vectors: vector length does not match its shape");
  }
  const BlockShape product = product_shape(x_shape, y_shape);
  AmbientVector out(product.ambient_dim());
  kron_into(x, x_shape, y, y_shape, out);
  return out;
}

SubspaceBasis identity_basis(const BlockShape& shape) {
  const std::size_t d = shape.ambient_dim();
  Matrix q(d, d);
  for (std::size_t i = 0; i < d; ++i) q(i, i) = 1.0;
  return SubspaceBasis(shape, std::move(q));
}

SubspaceBasis tensor_bases(const SubspaceBasis& left, const SubspaceBasis& right,
                           std::size_t element_cap) {
  const BlockShape product = product_shape(left.shape(), right.shape());
  const auto dim = checked_mul(left.dim(), right.dim());
  const auto elements = dim ? checked_mul(product.ambient_dim(), *dim) : std::nullopt;
  if (!elements || *elements > element_cap) {
    throw CapacityError("tensor product needs more than " + std::to_string(element_cap) +
                        " matrix elements");
  }
  Matrix q(product.ambient_dim(), *dim);
  const std::size_t m2 = right.dim();
  const std::size_t per_column = product.ambient_dim();
  detail::parallel_for(*dim, std::max<std::size_t>(1, (1u << 16) / per_column),
                       [&](std::size_t begin, std::size_t end) {
                         for (std::size_t c = begin; c < end; ++c) {
                           kron_into(left.columns().col(c / m2), left.shape(),
                                     right.columns().col(c % m2), right.shape(), q.col(c));
                         }
                       });
  return SubspaceBasis(product, std::move(q));
}

SubspaceBasis tensor_power(const SubspaceBasis& a, unsigned k, std::size_t element_cap) {
  if (k < 1) throw DomainError("tensor_power needs k >= 1");
  SubspaceBasis out = a;
  for (unsigned i = 1; i < k; ++i) out = tensor_bases(out, a, element_cap);
  return out;
}

SubspaceBasis extend_with_full_block(const SubspaceBasis& a, std::size_t width,
                                     std::size_t element_cap) {
  if (width < 1) throw DomainError("extend_with_full_block needs d >= 1");
  return tensor_bases(a, identity_basis(BlockShape(1, width)), element_cap);
}

}  // namespace l1embed
