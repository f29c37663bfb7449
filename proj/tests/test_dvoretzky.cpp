#include <algorithm>
#include <cmath>
#include <utility>
#include <numbers>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "l1embed/distortion.hpp"
#include "l1embed/dvoretzky.hpp"
#include "l1embed/errors.hpp"
#include "l1embed/special.hpp"

using namespace l1embed;

namespace {

const double kPi = std::numbers::pi;

}  // namespace

// mpmath values from tests/oracles/gen_oracles.py.
TEST(MeanNorm, MatchesHighPrecisionOracle) {
  struct Case {
    std::size_t n, b;
    double expected;
  };
  const Case cases[] = {
      {1, 7, 1.0},
      {2, 1, 1.2732395447351626862},
      {4, 1, 1.6976527263135502482},
      {8, 2, 2.5460761460761460761},
      {16, 4, 3.7746578106753112695},
      {2, 16, 1.4032204910228397237},
      {3, 5, 1.67578125},
      {100, 1, 7.9988173434884059835},
      {1000, 1000, 31.614879800699042297},
      {1000000, 1, 797.88476027403049046},
      {37, 11, 5.9499150096462951593},
      {1, 1, 1.0},
  };
  for (const auto& c : cases) {
    const double v = mean_norm(BlockShape(c.n, c.b)).value;
    EXPECT_NEAR(v, c.expected, 1e-12 * c.expected) << c.n << "," << c.b;
  }
}

TEST(MeanNorm, ClosedForms) {
  EXPECT_EQ(mean_norm(BlockShape(1, 9)).value, 1.0);
  EXPECT_NEAR(mean_norm(BlockShape(2, 1)).value, 4.0 / kPi, 1e-15);
  const MeanNorm m = mean_norm(BlockShape(4, 1));
  EXPECT_NEAR(m.value, 16.0 / (3.0 * kPi), 1e-15);
  EXPECT_NEAR(m.lower_bound, std::sqrt(2.0 / kPi) * 2.0, 1e-15);
  EXPECT_NEAR(m.upper_bound, std::sqrt(4.0 / 3.0) * std::sqrt(2.0 / kPi) * 2.0, 1e-15);
}

TEST(MeanNorm, StrictBoundsOnGrid) {
  for (std::size_t n = 2; n <= 128; ++n) {
    for (std::size_t b = 1; b <= 16; ++b) {
      const MeanNorm m = mean_norm(BlockShape(n, b));
      ASSERT_LT(m.lower_bound, m.value) << n << "," << b;
      ASSERT_LE(m.value, m.upper_bound) << n << "," << b;
      ASSERT_LE(m.value, std::sqrt(double(n))) << n << "," << b;
      if (b == 1) {
        ASSERT_LT(m.value, m.upper_bound);
      }
    }
  }
}

TEST(MeanNorm, ScalarLimitFromAbove) {
  const double limit = std::sqrt(2.0 / kPi);
  double previous = 1e9;
  for (std::size_t n = 4; n <= 4096; n *= 2) {
    const double r = mean_norm(BlockShape(n, 1)).value / std::sqrt(double(n));
    EXPECT_GT(r, limit);
    EXPECT_LT(r, previous);
    EXPECT_LE(r - limit, 1.0 / (2.0 * (n - 1)));
    previous = r;
  }
}

TEST(LogGammaHalfRatio, AgainstLgamma) {
  // lgamma(x + 1/2) - lgamma(x) from mpmath. Below x = 20 up to 40 recurrence
  // factors enter, hence a few ulps. The double difference of lgamma values
  // cancels, so that cross-check scales with lgamma itself.
  const std::pair<double, double> cases[] = {
      {0.5, -0.572364942924700087072}, {1.0, -0.120782237635245222346},
      {2.5, 0.408464310087026149785},  {7.0, 0.955113024748631960098},
      {19.5, 1.47879767823839704448},  {20.0, 1.49161678733130407355},
      {33.0, 1.74446604683501626439},  {150.0, 2.50448431525798384278},
      {1e6, 6.90775515398213705206},
  };
  for (auto [x, expected] : cases) {
    EXPECT_NEAR(log_gamma_half_ratio(x), expected, 2e-15) << x;
    EXPECT_NEAR(log_gamma_half_ratio(x), std::lgamma(x + 0.5) - std::lgamma(x),
                1e-15 * (1.0 + 8.0 * std::abs(std::lgamma(x + 0.5))))
        << x;
  }
  EXPECT_THROW(log_gamma_half_ratio(0.0), DomainError);
  EXPECT_THROW(log_gamma_half_ratio(-1.0), DomainError);
}

TEST(MaxSubspaceDim, Examples) {
  EXPECT_EQ(max_subspace_dim(BlockShape(512, 1), 0.3), 2u);
  EXPECT_EQ(max_subspace_dim(BlockShape(16, 4), 0.5), 0u);
  // Doubling eps quadruples the bound before flooring.
  const DvoretzkyConstants c{1.0, 1.0};
  EXPECT_EQ(max_subspace_dim(BlockShape(1000, 1), 0.1, c), 10u);
  EXPECT_EQ(max_subspace_dim(BlockShape(1000, 1), 0.2, c), 40u);
  EXPECT_THROW(max_subspace_dim(BlockShape(10, 1), 1.0), DomainError);
  EXPECT_THROW(max_subspace_dim(BlockShape(10, 1), 0.5, {0.0, 1.0}), DomainError);
}

TEST(Orthonormalize, SignConventionAndResidual) {
  Matrix a(3, 2);
  a(0, 0) = -2;
  a(1, 0) = 0;
  a(2, 0) = 0;
  a(0, 1) = 1;
  a(1, 1) = -3;
  a(2, 1) = 0;
  orthonormalize_columns(a);
  EXPECT_EQ(a(0, 0), 1.0);
  EXPECT_EQ(a(0, 1), 0.0);
  EXPECT_EQ(a(1, 1), 1.0);
}

TEST(Orthonormalize, DegenerateColumns) {
  Matrix a(3, 2);
  a(0, 0) = 1;
  a(1, 0) = 2;
  a(0, 1) = 2;
  a(1, 1) = 4;
  EXPECT_THROW(orthonormalize_columns(a), DegenerateRandomness);
  Matrix z(3, 1);
  EXPECT_THROW(orthonormalize_columns(z), DegenerateRandomness);
}

TEST(RandomSubspace, AccountingAndErrors) {
  const BlockShape s(8, 2);
  const auto raw = reference_seed(1, 4096);
  BitStream stream = BitStream::from_bytes(raw);
  const auto b = random_subspace(s, 3, stream, GaussianSpec(20));
  EXPECT_EQ(stream.consumed(), 16u * 3u * 20u);
  EXPECT_LT(orthonormality_residual(b), 1e-10);
  EXPECT_EQ(b.shape(), s);
  EXPECT_THROW(random_subspace(s, 0, stream, GaussianSpec(20)), ShapeError);
  EXPECT_THROW(random_subspace(s, 17, stream, GaussianSpec(20)), ShapeError);

  BitStream short_stream = BitStream::from_bytes(raw, 16 * 3 * 20 - 1);
  try {
    random_subspace(s, 3, short_stream, GaussianSpec(20));
    FAIL();
  } catch (const BudgetExhausted& e) {
    EXPECT_EQ(e.needed(), 960u);
    EXPECT_EQ(e.available(), 959u);
  }
  EXPECT_EQ(short_stream.consumed(), 0u);
}

TEST(RandomSubspace, Deterministic) {
  const auto a = fixtures::seeded_subspace(BlockShape(10, 3), 4, 77);
  const auto b = fixtures::seeded_subspace(BlockShape(10, 3), 4, 77);
  EXPECT_EQ(a.columns(), b.columns());
  const auto c = fixtures::seeded_subspace(BlockShape(10, 3), 4, 78);
  EXPECT_NE(a.columns(), c.columns());
}

TEST(RandomSubspace, FullSpaceContainsSpike) {
  const auto q = fixtures::seeded_subspace(BlockShape(4, 1), 4, 3);
  EXPECT_LT(orthonormality_residual(q), 1e-12);
  // e_1 = Q Q^T e_1, so its coefficients are the first row of Q.
  std::vector<double> coeffs(4);
  for (std::size_t j = 0; j < 4; ++j) coeffs[j] = q.columns()(0, j);
  EXPECT_NEAR(normalized_ratio(q.combine(coeffs), q.shape()), 0.5, 1e-12);
  EXPECT_NEAR(grid_oracle(fixtures::spike(4), 0.01).lambda_hat, 0.5, 0.0);
}

TEST(RandomSubspace, ResidualAtLargeAmbient) {
  for (std::size_t ambient : {256u, 4096u}) {
    const auto q = fixtures::seeded_subspace(BlockShape(ambient, 1), 8, ambient, 24);
    EXPECT_LT(orthonormality_residual(q), 1e-10) << ambient;
  }
}

// (n = 64, B = 1), m = 3: ratios concentrate, min above (1 - 0.5) sqrt(2/pi).
TEST(RandomSubspace, ConcentrationPassRate) {
  const double floor = 0.5 * std::sqrt(2.0 / kPi);
  int passed = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto e = fixtures::seeded_subspace(BlockShape(64, 1), 3, 1000 + seed);
    double lo = 1.0, hi = 0.0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
      const double r = normalized_ratio(e.combine(sphere_point(3, seed, i)), e.shape());
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    EXPECT_EQ(lo, sample_ratios(e, 10000, seed).min);
    if (lo >= 0.6 && hi <= 0.92 && lo > floor) ++passed;
  }
  EXPECT_GE(passed, 45);
}

// Permuting the ambient blocks of the seed matrix must not change the ratio
// distribution (the block norm is permutation invariant).
TEST(RandomSubspace, HaarPermutationSmoke) {
  const BlockShape s(32, 2);
  const auto e = fixtures::seeded_subspace(s, 3, 9);
  Matrix permuted(s.ambient_dim(), 3);
  std::vector<std::size_t> order(s.num_blocks());
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  std::rotate(order.begin(), order.begin() + 5, order.end());
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < s.num_blocks(); ++i) {
      for (std::size_t b = 0; b < 2; ++b) permuted(order[i] * 2 + b, j) = e.columns()(i * 2 + b, j);
    }
  }
  orthonormalize_columns(permuted);
  const SubspaceBasis f(s, permuted);

  const auto ratios = [](const SubspaceBasis& q) {
    std::vector<double> r;
    for (std::uint64_t i = 0; i < 4000; ++i) {
      r.push_back(normalized_ratio(q.combine(sphere_point(3, 5, i)), q.shape()));
    }
    std::sort(r.begin(), r.end());
    return r;
  };
  const auto x = ratios(e);
  const auto y = ratios(f);
  double ks = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i] <= y[j]) ++i; else ++j;
    ks = std::max(ks, std::abs(double(i) / x.size() - double(j) / y.size()));
  }
  EXPECT_LE(ks, 0.05);
}
