#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "l1embed/bench.hpp"
#include "l1embed/blockspace.hpp"
#include "l1embed/dvoretzky.hpp"
#include "l1embed/randbits.hpp"

namespace l1embed::fixtures {

// Basis from explicit columns; no orthonormality check.
inline SubspaceBasis basis_of(BlockShape shape,
                              std::initializer_list<std::vector<double>> columns) {
  Matrix q(shape.ambient_dim(), columns.size());
  std::size_t j = 0;
  for (const auto& c : columns) {
    for (std::size_t i = 0; i < c.size(); ++i) q(i, j) = c[i];
    ++j;
  }
  return SubspaceBasis(shape, std::move(q));
}

inline SubspaceBasis spike(std::size_t n) {
  std::vector<double> e(n, 0.0);
  e[0] = 1.0;
  return basis_of(BlockShape(n, 1), {e});
}

// A random subspace drawn from the reference byte source.
inline SubspaceBasis seeded_subspace(BlockShape shape, std::size_t dim, std::uint64_t seed,
                                     unsigned t = 32) {
  const std::size_t bits = shape.ambient_dim() * dim * t;
  const auto bytes = reference_seed(seed, (bits + 7) / 8);
  BitStream stream = BitStream::from_bytes(bytes);
  return random_subspace(shape, dim, stream, GaussianSpec(t));
}

}  // namespace l1embed::fixtures
