#pragma once

// Tensor products of block subspaces.
//
// For E in l1^{n1}(l2^{B1}) and F in l1^{n2}(l2^{B2}), E (x) F lives in
// l1^{n1 n2}(l2^{B1 B2}). The raw Kronecker product of two vectors is indexed
// by ((i1 B1 + b1) n2 B2 + i2 B2 + b2); the product layout regroups it into
// block i = i1 n2 + i2 and in-block offset b = b1 B2 + b2, so that the block
// (i1, i2) of x (x) y is exactly x_{i1} (x) y_{i2}.
//
// Product basis columns are ordered j-major: column j * m2 + k is the product
// of column j of the left basis with column k of the right one.

#include <cstddef>
#include <span>

#include "l1embed/blockspace.hpp"

namespace l1embed {

inline constexpr std::size_t kDefaultElementCap = std::size_t{1} << 27;

struct TensorLayout {
  BlockShape left;
  BlockShape right;

  BlockShape product() const;
  // Position in the product layout of raw Kronecker coordinate `raw`.
  std::size_t product_index(std::size_t raw) const;
};

// Coefficients t_{jk} of an element sum_{j,k} t_{jk} phi_j (x) psi_k, stored as
// an m1 x m2 matrix.
using CoefficientMatrix = Matrix;

// Flattens t into the j-major coefficient vector of the product basis.
std::vector<double> flatten_coefficients(const CoefficientMatrix& t);

// x (x) y in the product block layout.
AmbientVector tensor_vectors(std::span<const double> x, const BlockShape& x_shape,
                             std::span<const double> y, const BlockShape& y_shape);

// The full space of a shape, spanned by the coordinate vectors in order.
SubspaceBasis identity_basis(const BlockShape& shape);

// Throws CapacityError when the product matrix would exceed `element_cap` doubles.
SubspaceBasis tensor_bases(const SubspaceBasis& left, const SubspaceBasis& right,
                           std::size_t element_cap = kDefaultElementCap);

// left-associated: ((a (x) a) (x) a) ...; k = 1 returns a copy.
SubspaceBasis tensor_power(const SubspaceBasis& a, unsigned k,
                           std::size_t element_cap = kDefaultElementCap);

// a (x) (full space of shape (1, width)): blocks grow from B to B * width.
SubspaceBasis extend_with_full_block(const SubspaceBasis& a, std::size_t width,
                                     std::size_t element_cap = kDefaultElementCap);

}  // namespace l1embed
