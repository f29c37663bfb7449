#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "l1embed/distortion.hpp"
#include "l1embed/errors.hpp"
#include "l1embed/pipeline.hpp"

using namespace l1embed;

namespace {

PipelineConfig calibrated(double c) {
  PipelineConfig config;
  config.constants = {c, c};
  return config;
}

BitStream seed_stream(std::uint64_t index, std::size_t bytes = 1 << 16) {
  return BitStream::from_bytes(reference_seed(index, bytes));
}

}  // namespace

TEST(Plan, DepthAndWidth) {
  const auto p = plan(8192, 0.5, 0.5, calibrated(0.73));
  EXPECT_EQ(p.depth, 2u);
  EXPECT_EQ(p.base_width, 2u);
  EXPECT_EQ(p.block_width, 4u);
  const auto q = plan(100000, 1.0 / 3.0, 1.0 / 3.0, calibrated(2.0));
  EXPECT_EQ(q.depth, 3u);
  EXPECT_EQ(q.base_width, 3u);
}

TEST(Plan, HandCheckedParameters) {
  const auto p = plan(8192, 0.5, 0.5, calibrated(0.73));
  EXPECT_EQ(p.embed_dim, 22u);
  EXPECT_EQ(p.base_blocks, 19u);
  EXPECT_EQ(p.block_count, 361u);
  EXPECT_EQ(p.final_ambient, 7942u);
  EXPECT_EQ(p.base_dim, 3u);
  EXPECT_EQ(p.predicted_dim, 9u);
  EXPECT_EQ(p.precision_bits, 16u);
  EXPECT_EQ(p.predicted_bits, 3232u);
  EXPECT_EQ(p.base_bits() + p.embed_bits(), p.predicted_bits);
  EXPECT_EQ(p.budget_bits, 61440u);
  EXPECT_DOUBLE_EQ(p.predicted_ratio_lower, std::pow(0.5, 3.0) * 0.5);
  EXPECT_LT(p.l1_interval.lower, p.scaling);
  EXPECT_LT(p.scaling, p.l1_interval.upper);
  EXPECT_NEAR(p.scaling * (1 - p.eps_total), p.l1_interval.lower, 1e-12);
  EXPECT_NEAR(p.scaling * (1 + p.eps_total), p.l1_interval.upper, 1e-12);
  EXPECT_LE(p.ratio_upper(), 1.0);
}

TEST(Plan, ConservativeConstantsAreInfeasible) {
  try {
    plan(1000000, 0.5, 0.5);
    FAIL();
  } catch (const Infeasible& e) {
    EXPECT_EQ(e.constraint(), "m");
    ASSERT_TRUE(e.suggested_c2().has_value());
    const double c2 = *e.suggested_c2();
    EXPECT_NEAR(c2, 4.0 / 55.0, 1e-6);
    PipelineConfig config;
    config.constants.block = c2;
    const auto p = plan(1000000, 0.5, 0.5, config);
    EXPECT_EQ(p.embed_dim, 320u);
    EXPECT_EQ(p.base_blocks, 55u);
    EXPECT_EQ(p.base_dim, 1u);
  }
}

TEST(Plan, SingleStep) {
  PipelineConfig config;
  config.constants = {0.05, 0.5};
  const auto p = plan(256, 0.9, 1.0, config);
  EXPECT_EQ(p.depth, 1u);
  EXPECT_EQ(p.base_width, 2u);
  EXPECT_EQ(p.block_count, p.base_blocks);
  EXPECT_EQ(p.predicted_dim, p.base_dim);
  EXPECT_EQ(p.base_dim, max_subspace_dim(BlockShape(p.base_blocks, 2), 0.9, {0.05, 0.25}));
}

TEST(Plan, DomainErrors) {
  EXPECT_THROW(plan(15, 0.5, 0.5), DomainError);
  EXPECT_THROW(plan(100, 0.0, 0.5), DomainError);
  EXPECT_THROW(plan(100, 1.0, 0.5), DomainError);
  EXPECT_THROW(plan(100, 0.5, 0.0), DomainError);
  EXPECT_THROW(plan(100, 0.5, 1.5), DomainError);
  PipelineConfig bad;
  bad.constants.scalar = -1;
  EXPECT_THROW(plan(100, 0.5, 0.5, bad), DomainError);
}

TEST(Plan, BudgetAndSizeConstraints) {
  PipelineConfig tight = calibrated(0.73);
  tight.universal_constant = 1000.0;
  try {
    plan(8192, 0.5, 0.5, tight);
    FAIL();
  } catch (const Infeasible& e) {
    EXPECT_EQ(e.constraint(), "budget");
  }
  try {
    plan(64, 0.5, 0.5, calibrated(0.73));
    FAIL();
  } catch (const Infeasible& e) {
    EXPECT_EQ(e.constraint(), "n");
  }
}

// Invariants over a sweep of feasible plans.
TEST(Plan, Invariants) {
  int feasible = 0;
  for (std::size_t n : {1000u, 5000u, 20000u, 100000u}) {
    for (double eps : {0.3, 0.5, 0.7}) {
      for (double gamma : {0.34, 0.5, 0.8, 1.0}) {
        for (double c : {0.2, 0.73, 2.0}) {
          PipelineConfig config = calibrated(c);
          try {
            const auto p = plan(n, eps, gamma, config);
            ++feasible;
            EXPECT_LE(p.final_ambient, n);
            EXPECT_EQ(p.final_ambient, p.block_count * p.embed_dim);
            EXPECT_LE(p.predicted_bits, p.budget_bits);
            EXPECT_GE(p.base_blocks, 2u);
            EXPECT_GE(p.base_dim, 1u);
            EXPECT_GE(p.embed_dim, p.block_width);
            EXPECT_EQ(p.dimension_floor_met, p.predicted_dim >= p.dimension_floor);
            // n is maximal.
            EXPECT_GT(std::pow(double(p.base_blocks + 1), p.depth) * p.embed_dim, double(n));
            EXPECT_GE(p.precision_bits, 16u);
            EXPECT_LE(p.precision_bits, 52u);
          } catch (const Infeasible&) {
          }
        }
      }
    }
  }
  EXPECT_GT(feasible, 10);
}

TEST(EmbedBlocks, ShapesAndIsometry) {
  const auto f = fixtures::seeded_subspace(BlockShape(5, 3), 2, 40);
  const auto g = fixtures::seeded_subspace(BlockShape(12, 1), 3, 41);
  const auto out = embed_blocks(f, g);
  EXPECT_EQ(out.shape(), BlockShape(60, 1));
  EXPECT_EQ(out.dim(), 2u);
  EXPECT_LT(orthonormality_residual(out), 1e-12);
  EXPECT_THROW(embed_blocks(f, fixtures::seeded_subspace(BlockShape(12, 1), 2, 42)), ShapeError);
  EXPECT_THROW(embed_blocks(f, fixtures::seeded_subspace(BlockShape(6, 2), 3, 43)), ShapeError);
}

TEST(EmbedBlocks, IdentityEmbeddingIsInclusion) {
  const auto f = fixtures::seeded_subspace(BlockShape(4, 3), 2, 44);
  const auto out = embed_blocks(f, identity_basis(BlockShape(3, 1)));
  EXPECT_EQ(out.columns(), f.columns());
}

TEST(EmbedBlocks, ScalarBlocks) {
  const auto f = fixtures::seeded_subspace(BlockShape(6, 1), 2, 45);
  const auto g = fixtures::seeded_subspace(BlockShape(9, 1), 1, 46);
  const auto out = embed_blocks(f, g);
  double g_l1 = 0.0;
  for (double v : g.columns().col(0)) g_l1 += std::abs(v);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto a = sphere_point(2, 3, i);
    double f_l1 = 0.0;
    for (double v : f.combine(a)) f_l1 += std::abs(v);
    double out_l1 = 0.0;
    for (double v : out.combine(a)) out_l1 += std::abs(v);
    EXPECT_NEAR(out_l1, g_l1 * f_l1, 1e-12);
  }
}

TEST(EmbedBlocks, SingleBlockTwoPaths) {
  const auto f = fixtures::seeded_subspace(BlockShape(1, 3), 2, 47);
  const auto g = fixtures::seeded_subspace(BlockShape(10, 1), 3, 48);
  const auto out = embed_blocks(f, g);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto a = sphere_point(2, 8, i);
    const auto v = f.combine(a);
    const double direct = normalized_ratio(g.combine(v), g.shape());
    EXPECT_NEAR(normalized_ratio(out.combine(a), out.shape()), direct, 1e-9);
  }
}

TEST(Construct, AccountingDimensionAndIsometry) {
  BitStream stream = seed_stream(0);
  const auto r = construct(8192, 0.5, 0.5, stream, calibrated(0.73));
  EXPECT_EQ(r.bits_consumed, r.plan.predicted_bits);
  EXPECT_EQ(r.bits_consumed,
            (r.plan.base_blocks * r.plan.base_width * r.plan.base_dim +
             r.plan.embed_dim * r.plan.block_width) *
                r.plan.precision_bits);
  EXPECT_EQ(stream.consumed(), r.bits_consumed);
  EXPECT_EQ(r.attempts, 1u);
  EXPECT_EQ(r.basis.dim(), 9u);
  EXPECT_EQ(r.basis.shape(), BlockShape(r.plan.final_ambient, 1));
  EXPECT_LT(orthonormality_residual(r.basis), 1e-10);
  EXPECT_EQ(r.scaling, r.plan.scaling);
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto a = sphere_point(9, 4, i);
    for (double& v : a) v *= 3.0;
    EXPECT_NEAR(l2_norm(r.basis.combine(a)), 3.0, 1e-9);
  }
  const auto& c = r.certificate;
  EXPECT_LE(c.witness.lambda_hat, c.sampled.min);
  EXPECT_EQ(c.empirical_median, c.sampled.p50);
  EXPECT_EQ(c.sampled.count, 10000u);
}

TEST(Construct, ZeroPaddingIsNeutral) {
  BitStream stream = seed_stream(1);
  const auto r = construct(8192, 0.5, 0.5, stream, calibrated(0.73));
  const auto padded = r.padded_basis();
  EXPECT_EQ(padded.shape(), BlockShape(8192, 1));
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto a = sphere_point(9, 5, i);
    const auto x = r.basis.combine(a);
    const auto y = padded.combine(a);
    EXPECT_EQ(block_norm(x, r.basis.shape()), block_norm(y, padded.shape()));
    EXPECT_EQ(l2_norm(x), l2_norm(y));
  }
}

TEST(Construct, Deterministic) {
  BitStream a = seed_stream(2);
  BitStream b = seed_stream(2);
  const auto ra = construct(8192, 0.5, 0.5, a, calibrated(0.73));
  const auto rb = construct(8192, 0.5, 0.5, b, calibrated(0.73));
  EXPECT_EQ(ra.basis, rb.basis);
  EXPECT_EQ(ra.certificate.sampled.min, rb.certificate.sampled.min);
  EXPECT_EQ(ra.certificate.witness.lambda_hat, rb.certificate.witness.lambda_hat);
}

TEST(Construct, ShortStreamConsumesNothing) {
  const auto p = plan(8192, 0.5, 0.5, calibrated(0.73));
  const auto raw = reference_seed(3, 1024);
  BitStream stream = BitStream::from_bytes(raw, p.predicted_bits - 1);
  try {
    construct(8192, 0.5, 0.5, stream, calibrated(0.73));
    FAIL();
  } catch (const BudgetExhausted& e) {
    EXPECT_EQ(e.needed(), p.predicted_bits);
    EXPECT_EQ(e.available(), p.predicted_bits - 1);
  }
  EXPECT_EQ(stream.consumed(), 0u);
}

TEST(Construct, RetriesStopOnAcceptance) {
  PipelineConfig config = calibrated(0.73);
  config.retries = 3;
  BitStream stream = seed_stream(4);
  const auto r = construct(8192, 0.5, 0.5, stream, config);
  EXPECT_GE(r.certificate.sampled.p01, r.plan.ratio_lower());
  EXPECT_EQ(r.attempts, 1u);
  EXPECT_EQ(r.bits_consumed, r.plan.predicted_bits);
}

TEST(Construct, InfeasiblePlanPropagates) {
  BitStream stream = seed_stream(5);
  EXPECT_THROW(construct(1000000, 0.5, 0.5, stream), Infeasible);
  EXPECT_EQ(stream.consumed(), 0u);
}

// Single step (k = 1, B = 2) over 50 seeds.
TEST(Construct, SingleStepPassRate) {
  PipelineConfig config;
  config.constants = {0.05, 0.5};
  config.certificate_samples = 2000;
  config.minimizer_restarts = 2;
  config.minimizer_iters = 50;
  const double floor = 0.1 * std::sqrt(0.5);
  int passed = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    BitStream stream = seed_stream(100 + seed, 4096);
    const auto r = construct(256, 0.9, 1.0, stream, config);
    EXPECT_EQ(r.basis.dim(), r.plan.base_dim);
    EXPECT_EQ(r.bits_consumed, r.plan.predicted_bits);
    if (r.certificate.sampled.min >= floor) ++passed;
  }
  EXPECT_GE(passed, 45);
}

// With m^k <= 3 the grid oracle applies to the whole construction.
TEST(Construct, CertificateAgreesWithGrid) {
  PipelineConfig config;
  config.constants = {0.05, 0.5};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    BitStream stream = seed_stream(200 + seed, 4096);
    const auto r = construct(256, 0.9, 1.0, stream, config);
    ASSERT_LE(r.basis.dim(), 3u);
    const double delta = 0.005;
    const auto g = grid_oracle(r.basis, delta);
    EXPECT_GE(r.certificate.witness.lambda_hat, g.lambda_hat - delta - 1e-12);
  }
}
