#pragma once

// One random step: spherical mean of the block norm, the admissible subspace
// dimension for a distortion target, and a random subspace drawn from budgeted
// bits.

#include <cstddef>

#include "l1embed/blockspace.hpp"
#include "l1embed/randbits.hpp"

namespace l1embed {

// Expected block norm of a uniform point on the unit sphere of R^{nB},
//   M(n,B) = Gamma((B+1)/2)/Gamma(B/2) * Gamma(nB/2)/Gamma((nB+1)/2) * n,
// with the classical two-sided bounds:
//   B = 1:  sqrt(2/pi) sqrt(n) < M < sqrt(1 + 1/(n-1)) sqrt(2/pi) sqrt(n)   (n >= 2)
//   B > 1:  sqrt(1 - 1/B) sqrt(n) < M <= sqrt(n)
// For n = 1 (a single block) M = 1 and the upper bound is sqrt(n) = 1.
struct MeanNorm {
  BlockShape shape;
  double value;
  double lower_bound;
  double upper_bound;
};

MeanNorm mean_norm(const BlockShape& shape);

// Tunable constants of the one-step theorem. The theorem only asserts they
// exist; the defaults are conservative placeholders.
struct DvoretzkyConstants {
  double scalar = 0.05;  // B = 1: m <= c1 eps^2 n
  double block = 0.05;   // B > 1: m <= c2 eps^2 n B
};

// floor(c1 eps^2 n) for B = 1, floor(c2 eps^2 n B) otherwise. Zero means the
// parameters admit no subspace.
std::size_t max_subspace_dim(const BlockShape& shape, double eps,
                             const DvoretzkyConstants& constants = {});

// Orthonormalizes the columns of `a` in place: modified Gram-Schmidt, then one
// full re-orthogonalization pass, then the sign of each column is chosen so
// that its first nonzero coordinate is positive. Throws DegenerateRandomness
// when a column keeps less than 1e-12 of its original norm.
void orthonormalize_columns(Matrix& a);

// Fills an (nB x dim) matrix with discretized Gaussians, column by column, and
// orthonormalizes it. Consumes exactly nB * dim * spec.bits() bits; if the
// stream holds fewer, throws BudgetExhausted before reading anything.
SubspaceBasis random_subspace(const BlockShape& shape, std::size_t dim,
                              BitStream& stream, GaussianSpec spec);

}  // namespace l1embed
