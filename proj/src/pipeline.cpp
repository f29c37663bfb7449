#include "l1embed/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "l1embed/errors.hpp"

namespace l1embed {

namespace {

// 1/gamma and 1/eps are often meant to be integers (gamma = 1/3); a relative
// slack keeps ceil(3.0000000000000004) at 3.
unsigned ceil_reciprocal(double x) {
  return static_cast<unsigned>(std::ceil(1.0 / x * (1.0 - 1e-12)));
}

std::optional<std::size_t> checked_pow(std::size_t base, unsigned exponent) {
  std::size_t out = 1;
  for (unsigned i = 0; i < exponent; ++i) {
    if (__builtin_mul_overflow(out, base, &out)) return std::nullopt;
  }
  return out;
}

std::size_t floor_product(double c, double eps, double factor) {
  return static_cast<std::size_t>(std::floor(c * eps * eps * factor));
}

}  // namespace

std::uint64_t ConstructionPlan::base_bits() const {
  return std::uint64_t{base_blocks} * base_width * base_dim * precision_bits;
}

std::uint64_t ConstructionPlan::embed_bits() const {
  return std::uint64_t{embed_dim} * block_width * precision_bits;
}

double ConstructionPlan::ratio_lower() const {
  return l1_interval.lower / std::sqrt(static_cast<double>(final_ambient));
}

double ConstructionPlan::ratio_upper() const {
  return l1_interval.upper / std::sqrt(static_cast<double>(final_ambient));
}

ConstructionPlan plan(std::size_t n_target, double eps, double gamma,
                      const PipelineConfig& config) {
  if (n_target < 16) throw DomainError("plan requires N >= 16");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");
  const double c1 = config.constants.scalar;
  const double c2 = config.constants.block;
  if (!(c1 > 0.0) || !(c2 > 0.0) || !(config.c0() > 0.0) ||
      !(config.universal_constant > 0.0)) {
    throw DomainError("constants c1, c2, c0, c_univ must be positive");
  }

  ConstructionPlan p;
  p.target_dim = n_target;
  p.eps = eps;
  p.gamma = gamma;
  p.depth = ceil_reciprocal(gamma);
  p.base_width = ceil_reciprocal(eps);
  const unsigned k = p.depth;

  const auto beta = checked_pow(p.base_width, k);
  if (!beta || *beta > n_target) {
    throw Infeasible("embedding", "block width B^k exceeds N");
  }
  p.block_width = *beta;

  // Smallest n' with floor(c1 eps^2 n') >= beta.
  const double slope = c1 * eps * eps;
  std::size_t embed = static_cast<std::size_t>(std::ceil(static_cast<double>(p.block_width) / slope));
  while (embed > 1 && floor_product(c1, eps, static_cast<double>(embed - 1)) >= p.block_width) --embed;
  while (floor_product(c1, eps, static_cast<double>(embed)) < p.block_width) ++embed;
  p.embed_dim = std::max(embed, p.block_width);
  if (p.embed_dim > n_target / 2) {
    std::ostringstream msg;
    msg << "embedding of l2^" << p.block_width << " needs n' = " << p.embed_dim
        << " coordinates, leaving no room for n >= 2 blocks in N = " << n_target;
    throw Infeasible("n", msg.str());
  }

  // Largest n with n^k n' <= N.
  const std::size_t room = n_target / p.embed_dim;
  auto blocks = static_cast<std::size_t>(std::pow(static_cast<double>(room), 1.0 / k));
  while (blocks > 1) {
    const auto power = checked_pow(blocks, k);
    if (power && *power <= room) break;
    --blocks;
  }
  while (true) {
    const auto power = checked_pow(blocks + 1, k);
    if (!power || *power > room) break;
    ++blocks;
  }
  p.base_blocks = blocks;
  if (blocks < 2) {
    std::ostringstream msg;
    msg << "N = " << n_target << " leaves n = " << blocks << " < 2 base blocks (n' = "
        << p.embed_dim << ", k = " << k << ")";
    throw Infeasible("n", msg.str());
  }
  p.block_count = *checked_pow(blocks, k);
  p.final_ambient = p.block_count * p.embed_dim;

  const double base_ambient = static_cast<double>(blocks * p.base_width);
  if (p.base_width >= 2) {
    const double shrink = 1.0 - 1.0 / static_cast<double>(p.base_width);
    p.base_dim = floor_product(c2, eps, shrink * base_ambient);
    if (p.base_dim < 1) {
      double needed = 1.0 / (eps * eps * shrink * base_ambient);
      while (floor_product(needed, eps, shrink * base_ambient) < 1) {
        needed = std::nextafter(needed, 2.0 * needed);
      }
      std::ostringstream msg;
      msg << "base dimension m = floor(c2 eps^2 (1 - 1/B) n B) is 0 with c2 = " << c2
          << " (n = " << blocks << ", B = " << p.base_width << "); c2 >= " << needed
          << " is needed";
      throw Infeasible("m", msg.str(), needed);
    }
  } else {
    p.base_dim = floor_product(c1, eps, base_ambient);
    if (p.base_dim < 1) throw Infeasible("m", "base dimension m = floor(c1 eps^2 n) is 0");
  }
  if (p.base_dim > blocks * p.base_width) {
    throw Infeasible("m", "base dimension m exceeds nB; the Dvoretzky constants are too large");
  }

  const std::uint64_t base_entries = std::uint64_t{blocks} * p.base_width * p.base_dim;
  const std::uint64_t embed_entries = std::uint64_t{p.embed_dim} * p.block_width;
  p.precision_bits = precision_for(std::max(base_entries, embed_entries), eps).bits();
  p.predicted_bits = (base_entries + embed_entries) * p.precision_bits;
  p.budget_bits = required_bits(n_target, eps, gamma, config.universal_constant);
  if (p.predicted_bits > p.budget_bits) {
    std::ostringstream msg;
    msg << "construction needs " << p.predicted_bits << " bits, budget allows "
        << p.budget_bits;
    throw Infeasible("budget", msg.str());
  }

  const auto dim = checked_pow(p.base_dim, k);
  if (!dim) throw Infeasible("m", "subspace dimension m^k overflows");
  p.predicted_dim = *dim;
  const double c0 = config.c0();
  p.dimension_floor = static_cast<std::size_t>(
      std::floor(std::pow(c0 * eps * eps, k) * static_cast<double>(p.block_count) *
                 static_cast<double>(p.block_width)));
  p.dimension_floor_met = p.predicted_dim >= p.dimension_floor;

  // k tensor stages lose at most (1-eps)^{3/2} each; the embedding of l2^beta
  // into l1^{n'} contributes the scalar one-step bounds.
  const double tensor_loss = std::pow(1.0 - eps, 1.5 * k);
  p.predicted_ratio_lower = tensor_loss * (1.0 - eps);
  const double gauss = std::sqrt(2.0 / std::numbers::pi);
  const double root_blocks = std::sqrt(static_cast<double>(p.block_count));
  const double embed_width = static_cast<double>(p.embed_dim);
  const double root_embed = std::sqrt(embed_width);
  p.l1_interval.lower = p.predicted_ratio_lower * root_blocks * gauss * root_embed;
  p.l1_interval.upper =
      std::min(root_blocks * (1.0 + eps) * std::sqrt(embed_width / (embed_width - 1.0)) * gauss * root_embed,
               std::sqrt(static_cast<double>(p.final_ambient)));
  p.scaling = 0.5 * (p.l1_interval.lower + p.l1_interval.upper);
  p.eps_total = (p.l1_interval.upper - p.l1_interval.lower) /
                (p.l1_interval.upper + p.l1_interval.lower);
  return p;
}

SubspaceBasis embed_blocks(const SubspaceBasis& blocks, const SubspaceBasis& embedding) {
  const std::size_t beta = blocks.shape().block_width();
  if (embedding.shape().block_width() != 1 || embedding.dim() != beta) {
    throw ShapeError("embedding must be a beta-dimensional subspace of a scalar l1 space");
  }
  const std::size_t out_width = embedding.shape().num_blocks();
  const std::size_t nu = blocks.shape().num_blocks();
  const BlockShape out_shape(nu * out_width, 1);
  const Matrix& f = blocks.columns();
  const Matrix& g = embedding.columns();
  Matrix out(out_shape.ambient_dim(), blocks.dim());
  for (std::size_t c = 0; c < blocks.dim(); ++c) {
    const auto src = f.col(c);
    auto dst = out.col(c);
    for (std::size_t i = 0; i < nu; ++i) {
      double* target = dst.data() + i * out_width;
      for (std::size_t b = 0; b < beta; ++b) {
        const double v = src[i * beta + b];
        if (v == 0.0) continue;
        const auto gcol = g.col(b);
        for (std::size_t r = 0; r < out_width; ++r) target[r] += v * gcol[r];
      }
    }
  }
  return SubspaceBasis(out_shape, std::move(out));
}

SubspaceBasis ConstructionResult::padded_basis() const {
  const std::size_t rows = plan.target_dim;
  Matrix out(rows, basis.dim());
  for (std::size_t c = 0; c < basis.dim(); ++c) {
    const auto src = basis.columns().col(c);
    std::copy(src.begin(), src.end(), out.col(c).begin());
  }
  return SubspaceBasis(BlockShape(rows, 1), std::move(out));
}

namespace {

struct Attempt {
  SubspaceBasis basis;
  Certificate certificate;
};

Attempt run_attempt(const ConstructionPlan& p, BitStream& stream, const PipelineConfig& config) {
  const GaussianSpec spec(p.precision_bits);
  const SubspaceBasis base = random_subspace(p.base_shape(), p.base_dim, stream, spec);
  const SubspaceBasis tensored = tensor_power(base, p.depth, config.element_cap);
  const SubspaceBasis embedding = random_subspace(p.embed_shape(), p.block_width, stream, spec);
  SubspaceBasis out = embed_blocks(tensored, embedding);

  Certificate cert;
  cert.sampled = sample_ratios(out, config.certificate_samples, config.certificate_key);
  std::vector<std::vector<double>> starts;
  for (std::size_t r = 0; r < config.minimizer_restarts; ++r) {
    starts.push_back(sphere_point(out.dim(), config.certificate_key, r));
  }
  starts.push_back(cert.sampled.argmin);
  cert.witness = minimize_ratio_from(out, starts, config.minimizer_iters);
  cert.empirical_median = cert.sampled.p50;
  return Attempt{std::move(out), std::move(cert)};
}

}  // namespace

ConstructionResult construct(std::size_t n_target, double eps, double gamma,
                             BitStream& stream, const PipelineConfig& config) {
  const ConstructionPlan p = plan(n_target, eps, gamma, config);
  if (stream.remaining() < p.predicted_bits) {
    throw BudgetExhausted("construct", p.predicted_bits, stream.remaining());
  }
  const std::size_t start = stream.consumed();
  unsigned attempts = 0;
  std::optional<Attempt> current;
  while (true) {
    current = run_attempt(p, stream, config);
    ++attempts;
    const bool accepted = current->certificate.sampled.p01 >= p.ratio_lower();
    if (accepted || attempts > config.retries || stream.remaining() < p.predicted_bits) break;
  }
  const std::uint64_t consumed = stream.consumed() - start;
  if (consumed != p.predicted_bits * attempts) {
    throw std::logic_error("bit accounting mismatch in construct");
  }
  return ConstructionResult{p,        std::move(current->basis), p.scaling, consumed,
                            attempts, std::move(current->certificate)};
}

}  // namespace l1embed
