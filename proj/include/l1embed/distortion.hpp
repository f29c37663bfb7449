#pragma once

// Estimating Lambda_1(E) = min over unit x in E of normalized_ratio(x).
//
// Three estimators, all reproducible from their inputs and a 64-bit key:
//  - sample_ratios: statistics of the ratio at uniform random points of E;
//  - minimize_ratio: projected subgradient descent from random starts, giving a
//    witnessed upper bound on Lambda_1;
//  - grid_oracle: exhaustive delta-net of the coefficient sphere for m <= 3,
//    giving a certified bracket.
// None of them touch the budgeted BitStream.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "l1embed/blockspace.hpp"

namespace l1embed {

enum class EstimateMethod { sampled, subgradient, grid };

const char* to_string(EstimateMethod method) noexcept;

struct DistortionEstimate {
  // Smallest ratio found; an upper bound on Lambda_1.
  double lambda_hat = 1.0;
  // Unit coefficient vector a with normalized_ratio(Q a) == lambda_hat.
  std::vector<double> witness;
  EstimateMethod method = EstimateMethod::sampled;
  // For grid: Lambda_1 lies in [lambda_hat - bracket_halfwidth, lambda_hat].
  double bracket_halfwidth = 0.0;
  std::size_t samples_or_iters = 0;
};

struct RatioStats {
  std::size_t count = 0;
  double min = 1.0;
  double mean = 1.0;
  double p01 = 1.0;  // sorted[floor(0.01 * (count - 1))]
  double p50 = 1.0;  // sorted[floor(0.50 * (count - 1))]
  std::uint64_t key = 0;
  std::vector<double> argmin;  // coefficients of the minimizing sample
};

// Unit coefficient vector of sample `index` under `key`: m keyed normals,
// normalized. Shared by sample_ratios and the starts of minimize_ratio.
std::vector<double> sphere_point(std::size_t dim, std::uint64_t key, std::uint64_t index);

RatioStats sample_ratios(const SubspaceBasis& basis, std::size_t count, std::uint64_t key);

// Restart r starts from sphere_point(m, key, r), i.e. from sample r of
// sample_ratios(basis, ., key); the running minimum includes the starts.
DistortionEstimate minimize_ratio(const SubspaceBasis& basis, std::size_t restarts,
                                  std::size_t iters, std::uint64_t key);

// Same descent from caller-supplied starting coefficients.
DistortionEstimate minimize_ratio_from(const SubspaceBasis& basis,
                                       std::span<const std::vector<double>> starts,
                                       std::size_t iters);

// Certified bracket for m <= 3 (UnsupportedDimension otherwise), 0 < resolution <= 0.1.
DistortionEstimate grid_oracle(const SubspaceBasis& basis, double resolution);

struct MonteCarloMean {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Sample mean and standard error of block_norm at `count` (>= 100) uniform
// points of the unit sphere of R^{nB}.
MonteCarloMean mc_mean_norm(const BlockShape& shape, std::size_t count, std::uint64_t key);

}  // namespace l1embed
