#include "l1embed/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "l1embed/counter_rng.hpp"
#include "l1embed/detail/parallel.hpp"
#include "l1embed/errors.hpp"

namespace l1embed {

const char* to_string(EstimateMethod method) noexcept {
  switch (method) {
    case EstimateMethod::sampled:
      return "sampled";
    case EstimateMethod::subgradient:
      return "subgradient";
    case EstimateMethod::grid:
      return "grid";
  }
  return "unknown";
}

namespace {

void combine_into(const Matrix& q, std::span<const double> a, std::span<double> x) {
  std::fill(x.begin(), x.end(), 0.0);
  for (std::size_t j = 0; j < q.cols(); ++j) {
    const double c = a[j];
    const auto col = q.col(j);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += c * col[i];
  }
}

double ratio_at(const SubspaceBasis& basis, std::span<const double> a, std::span<double> x) {
  combine_into(basis.columns(), a, x);
  return normalized_ratio(x, basis.shape());
}

void normalize(std::span<double> a) {
  const double norm = l2_norm(a);
  for (double& v : a) v /= norm;
}

// (index, value) pairs reduced in index order so that ties go to the first index.
struct Best {
  double value = std::numeric_limits<double>::infinity();
  std::size_t index = 0;
  std::vector<double> coefficients;
};

}  // namespace

std::vector<double> sphere_point(std::size_t dim, std::uint64_t key, std::uint64_t index) {
  KeyedNormals normals(key, index);
  std::vector<double> a(dim);
  do {
    for (double& v : a) v = normals();
  } while (l2_norm(a) == 0.0);
  normalize(a);
  return a;
}

RatioStats sample_ratios(const SubspaceBasis& basis, std::size_t count, std::uint64_t key) {
  if (count < 1) throw DomainError("sample_ratios needs count >= 1");
  const std::size_t m = basis.dim();
  std::vector<double> ratios(count);
  detail::parallel_for(count, 256, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(basis.shape().ambient_dim());
    for (std::size_t i = begin; i < end; ++i) {
      ratios[i] = ratio_at(basis, sphere_point(m, key, i), x);
    }
  });

  RatioStats stats;
  stats.count = count;
  stats.key = key;
  std::size_t argmin = 0;
  detail::CompensatedSum sum;
  for (std::size_t i = 0; i < count; ++i) {
    sum.add(ratios[i]);
    if (ratios[i] < ratios[argmin]) argmin = i;
  }
  stats.min = ratios[argmin];
  stats.mean = sum.value() / static_cast<double>(count);
  stats.argmin = sphere_point(m, key, argmin);
  std::sort(ratios.begin(), ratios.end());
  const auto quantile = [&](double q) {
    return ratios[static_cast<std::size_t>(std::floor(q * static_cast<double>(count - 1)))];
  };
  stats.p01 = quantile(0.01);
  stats.p50 = quantile(0.50);
  return stats;
}

DistortionEstimate minimize_ratio_from(const SubspaceBasis& basis,
                                       std::span<const std::vector<double>> starts,
                                       std::size_t iters) {
  if (starts.empty() || iters < 1) {
    throw DomainError("minimize_ratio needs restarts >= 1 and iters >= 1");
  }
  const std::size_t m = basis.dim();
  const Matrix& q = basis.columns();
  const BlockShape& shape = basis.shape();
  const std::size_t width = shape.block_width();
  const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(shape.num_blocks()));
  constexpr double kStep0 = 0.2;
  for (const auto& start : starts) {
    if (start.size() != m) throw ShapeError("start vector has the wrong dimension");
    if (l2_norm(start) == 0.0) throw DomainError("start vector is zero");
  }

  std::vector<Best> per_start(starts.size());
  detail::parallel_for(starts.size(), 1, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(shape.ambient_dim());
    std::vector<double> s(shape.ambient_dim());
    std::vector<double> g(m);
    for (std::size_t r = begin; r < end; ++r) {
      std::vector<double> a = starts[r];
      normalize(a);
      Best& best = per_start[r];
      best.value = ratio_at(basis, a, x);
      best.coefficients = a;
      for (std::size_t step = 0; step < iters; ++step) {
        // x holds Q a from the last evaluation.
        for (std::size_t start = 0; start < x.size(); start += width) {
          const auto block = std::span<const double>(x).subspan(start, width);
          const double norm = l2_norm(block);
          for (std::size_t b = 0; b < width; ++b) {
            s[start + b] = norm > 0.0 ? block[b] / norm : 0.0;
          }
        }
        for (std::size_t j = 0; j < m; ++j) g[j] = detail::dot(q.col(j), s) * inv_root_n;
        const double radial = detail::dot(g, a);
        const double eta = kStep0 / std::sqrt(static_cast<double>(step + 1));
        for (std::size_t j = 0; j < m; ++j) a[j] -= eta * (g[j] - radial * a[j]);
        normalize(a);
        const double value = ratio_at(basis, a, x);
        if (value < best.value) {
          best.value = value;
          best.coefficients = a;
        }
      }
    }
  });

  std::size_t winner = 0;
  for (std::size_t r = 1; r < per_start.size(); ++r) {
    if (per_start[r].value < per_start[winner].value) winner = r;
  }
  DistortionEstimate out;
  out.lambda_hat = per_start[winner].value;
  out.witness = per_start[winner].coefficients;
  out.method = EstimateMethod::subgradient;
  out.samples_or_iters = starts.size() * iters;
  return out;
}

DistortionEstimate minimize_ratio(const SubspaceBasis& basis, std::size_t restarts,
                                  std::size_t iters, std::uint64_t key) {
  if (restarts < 1) throw DomainError("minimize_ratio needs restarts >= 1");
  std::vector<std::vector<double>> starts;
  starts.reserve(restarts);
  for (std::size_t r = 0; r < restarts; ++r) starts.push_back(sphere_point(basis.dim(), key, r));
  return minimize_ratio_from(basis, starts, iters);
}

namespace {

// Minimum over the points of one latitude band (or the whole circle for m = 2).
template <class PointFn>
Best scan(const SubspaceBasis& basis, std::size_t count, PointFn point) {
  Best best;
  std::vector<double> x(basis.shape().ambient_dim());
  std::vector<double> a(basis.dim());
  for (std::size_t j = 0; j < count; ++j) {
    point(j, a);
    const double value = ratio_at(basis, a, x);
    if (value < best.value) {
      best.value = value;
      best.index = j;
      best.coefficients = a;
    }
  }
  return best;
}

}  // namespace

DistortionEstimate grid_oracle(const SubspaceBasis& basis, double resolution) {
  const std::size_t m = basis.dim();
  if (m > 3) {
    throw UnsupportedDimension("grid oracle supports m <= 3, got m = " + std::to_string(m));
  }
  if (!(resolution > 0.0 && resolution <= 0.1)) {
    throw DomainError("grid resolution must lie in (0, 0.1]");
  }
  constexpr double pi = std::numbers::pi;
  DistortionEstimate out;
  out.method = EstimateMethod::grid;

  if (m == 1) {
    std::vector<double> x(basis.shape().ambient_dim());
    out.witness = {1.0};
    out.lambda_hat = ratio_at(basis, out.witness, x);
    out.bracket_halfwidth = 0.0;
    out.samples_or_iters = 1;
    return out;
  }

  if (m == 2) {
    // a and -a have the same ratio, so angles in [0, pi) suffice. Spacing delta
    // leaves every point within geodesic distance delta/2 of the net.
    const auto count = static_cast<std::size_t>(std::ceil(pi / resolution));
    const double step = pi / static_cast<double>(count);
    const Best best = scan(basis, count, [&](std::size_t j, std::span<double> a) {
      const double theta = step * static_cast<double>(j);
      a[0] = std::cos(theta);
      a[1] = std::sin(theta);
    });
    out.lambda_hat = best.value;
    out.witness = best.coefficients;
    out.bracket_halfwidth = resolution;
    out.samples_or_iters = count;
    return out;
  }

  // m = 3: upper hemisphere (antipodal symmetry). Bands at polar angle
  // theta_i = i h, h = delta / sqrt(2), the last one on the equator; band i has
  // L_i = ceil(2 pi sin(theta_i) / h) equally spaced longitudes. A point is
  // within h/2 of a band along its meridian and within h/2 of a net point
  // along the band, so the covering radius is at most h <= delta.
  const double h = resolution / std::numbers::sqrt2;
  const auto bands = static_cast<std::size_t>(std::ceil((pi / 2.0) / h)) + 1;
  std::vector<double> theta(bands);
  std::vector<std::size_t> longitudes(bands);
  for (std::size_t i = 0; i < bands; ++i) {
    theta[i] = std::min(static_cast<double>(i) * h, pi / 2.0);
    longitudes[i] = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(2.0 * pi * std::sin(theta[i]) / h)));
  }
  std::vector<Best> per_band(bands);
  detail::parallel_for(bands, 8, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double st = std::sin(theta[i]);
      const double ct = std::cos(theta[i]);
      const double dphi = 2.0 * pi / static_cast<double>(longitudes[i]);
      per_band[i] = scan(basis, longitudes[i], [&](std::size_t j, std::span<double> a) {
        const double phi = dphi * static_cast<double>(j);
        a[0] = st * std::cos(phi);
        a[1] = st * std::sin(phi);
        a[2] = ct;
      });
    }
  });
  std::size_t winner = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < bands; ++i) {
    total += longitudes[i];
    if (per_band[i].value < per_band[winner].value) winner = i;
  }
  out.lambda_hat = per_band[winner].value;
  out.witness = per_band[winner].coefficients;
  out.bracket_halfwidth = resolution;
  out.samples_or_iters = total;
  return out;
}

MonteCarloMean mc_mean_norm(const BlockShape& shape, std::size_t count, std::uint64_t key) {
  if (count < 100) throw DomainError("mc_mean_norm needs count >= 100");
  const std::size_t dim = shape.ambient_dim();
  std::vector<double> values(count);
  detail::parallel_for(count, 1024, [&](std::size_t begin, std::size_t end) {
    std::vector<double> g(dim);
    for (std::size_t i = begin; i < end; ++i) {
      KeyedNormals normals(key, i);
      double euclid = 0.0;
      do {
        for (double& v : g) v = normals();
        euclid = l2_norm(g);
      } while (euclid == 0.0);
      values[i] = block_norm(g, shape) / euclid;
    }
  });
  detail::CompensatedSum sum;
  for (double v : values) sum.add(v);
  const double mean = sum.value() / static_cast<double>(count);
  detail::CompensatedSum squares;
  for (double v : values) squares.add((v - mean) * (v - mean));
  const double variance = squares.value() / static_cast<double>(count - 1);
  return MonteCarloMean{mean, std::sqrt(variance / static_cast<double>(count))};
}

}  // namespace l1embed
