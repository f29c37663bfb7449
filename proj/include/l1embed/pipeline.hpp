#pragma once

// End-to-end construction of an almost-Euclidean subspace of l1^N.
//
//   1. a random m-dimensional E in l1^n(l2^B), B = ceil(1/eps);
//   2. F = E (x) ... (x) E (k = ceil(1/gamma) factors) in l1^nu(l2^beta),
//      nu = n^k, beta = B^k;
//   3. a random beta-dimensional G in l1^{n'} replaces every l2^beta block of F
//      by its image under G, landing in l1^{nu n'};
//   4. zero padding up to N.
//
// All Gaussian entries come from one BitStream: first the nB x m matrix of E,
// then the n' x beta matrix of G, each entry using t bits.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "l1embed/blockspace.hpp"
#include "l1embed/distortion.hpp"
#include "l1embed/dvoretzky.hpp"
#include "l1embed/randbits.hpp"
#include "l1embed/tensor.hpp"

namespace l1embed {

struct PipelineConfig {
  DvoretzkyConstants constants;              // c1 (scalar), c2 (block)
  std::optional<double> dimension_constant;  // c0; defaults to c2
  double universal_constant = 1.0;           // c in the budget formula
  unsigned retries = 0;
  std::size_t element_cap = kDefaultElementCap;
  std::uint64_t certificate_key = 0;
  std::size_t certificate_samples = 10000;
  std::size_t minimizer_restarts = 8;
  std::size_t minimizer_iters = 200;

  double c0() const { return dimension_constant.value_or(constants.block); }
};

// Bounds on |x|_1 / |x|_2 over the constructed subspace.
struct RatioInterval {
  double lower = 0.0;
  double upper = 0.0;
};

struct ConstructionPlan {
  std::size_t target_dim = 0;  // N
  double eps = 0.0;
  double gamma = 0.0;
  unsigned depth = 0;             // k
  std::size_t base_blocks = 0;    // n
  std::size_t base_width = 0;     // B
  std::size_t base_dim = 0;       // m
  std::size_t embed_dim = 0;      // n'
  std::size_t block_count = 0;    // nu = n^k
  std::size_t block_width = 0;    // beta = B^k
  std::size_t final_ambient = 0;  // nu * n' <= N
  std::size_t predicted_dim = 0;  // m^k
  std::size_t dimension_floor = 0;  // floor((c0 eps^2)^k nu beta)
  bool dimension_floor_met = false;
  unsigned precision_bits = 0;    // t
  std::uint64_t predicted_bits = 0;
  std::uint64_t budget_bits = 0;  // required_bits(N, eps, gamma, c)
  double predicted_ratio_lower = 0.0;  // (1-eps)^{3k/2} (1-eps)
  RatioInterval l1_interval;           // in units of |x|_2
  double scaling = 0.0;                // M: midpoint of l1_interval
  double eps_total = 0.0;              // l1_interval = [(1-eps_total) M, (1+eps_total) M]

  BlockShape base_shape() const { return BlockShape(base_blocks, base_width); }
  BlockShape embed_shape() const { return BlockShape(embed_dim, 1); }
  std::uint64_t base_bits() const;
  std::uint64_t embed_bits() const;
  // l1_interval as normalized ratios in l1^{final_ambient}.
  double ratio_lower() const;
  double ratio_upper() const;
};

// Raised by plan() when the parameters admit no construction. `constraint`
// names the binding quantity: "n", "m", "embedding", or "budget".
class Infeasible : public std::runtime_error {
 public:
  Infeasible(std::string constraint, const std::string& message,
             std::optional<double> suggested_c2 = std::nullopt)
      : std::runtime_error(message),
        constraint_(std::move(constraint)),
        suggested_c2_(suggested_c2) {}

  const std::string& constraint() const noexcept { return constraint_; }
  // For constraint "m": the smallest c2 giving m >= 1 with everything else fixed.
  std::optional<double> suggested_c2() const noexcept { return suggested_c2_; }

 private:
  std::string constraint_;
  std::optional<double> suggested_c2_;
};

// Requires N >= 16, eps in (0, 1) and gamma in (0, 1] (DomainError otherwise).
// gamma = 1 gives k = 1: a single random step followed by the embedding.
ConstructionPlan plan(std::size_t n_target, double eps, double gamma,
                      const PipelineConfig& config = {});

// Replaces every beta-wide block v of each column of `blocks` by `embedding` * v.
// `embedding` must have shape (n', 1) and exactly beta columns.
SubspaceBasis embed_blocks(const SubspaceBasis& blocks, const SubspaceBasis& embedding);

struct Certificate {
  RatioStats sampled;
  DistortionEstimate witness;
  double empirical_median = 0.0;
};

struct ConstructionResult {
  ConstructionPlan plan;
  SubspaceBasis basis;  // shape (final_ambient, 1)
  double scaling = 0.0;
  std::uint64_t bits_consumed = 0;
  unsigned attempts = 0;
  Certificate certificate;

  // The same subspace inside l1^N, zero-padded.
  SubspaceBasis padded_basis() const;
};

// Runs the plan against `stream`. Throws Infeasible, BudgetExhausted (before
// consuming anything when the stream cannot cover one attempt), or
// DegenerateRandomness.
ConstructionResult construct(std::size_t n_target, double eps, double gamma,
                             BitStream& stream, const PipelineConfig& config = {});

}  // namespace l1embed
