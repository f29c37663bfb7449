#pragma once

// Parameter sweeps over construct(), one CSV row per (grid point, seed).
//
// Config (JSON or TOML) keys, all optional:
//   N, eps, gamma, c1, c2   lists of values; the grid is their cartesian
//                           product in this order (defaults: c1 = c2 = [0.05])
//   seeds                   seeds per grid point (default 1)
//   seed_bytes              size of each reference seed (default 65536)
//   samples, restarts, iters, key   certificate effort (10000, 8, 200, 0)
// An empty list gives an empty grid and a header-only CSV.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace l1embed {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BenchConfig {
  std::vector<std::int64_t> targets;
  std::vector<double> eps;
  std::vector<double> gamma;
  std::vector<double> c1{0.05};
  std::vector<double> c2{0.05};
  std::size_t seeds = 1;
  std::size_t seed_bytes = 65536;
  std::size_t samples = 10000;
  std::size_t restarts = 8;
  std::size_t iters = 200;
  std::uint64_t key = 0;
};

enum class ConfigSyntax { json, toml };

BenchConfig parse_bench_config(std::string_view text, ConfigSyntax syntax);

// Reference seed bytes for sweeps and tests: the SplitMix64 sequence started
// from state `index`, each 64-bit output written big-endian. This is a fixed,
// public byte source, not a randomness extractor.
std::vector<std::uint8_t> reference_seed(std::uint64_t index, std::size_t size);

inline constexpr std::string_view kBenchCsvHeader =
    "seed,N,eps,gamma,c1,c2,status,k,n,B,m,n_embed,N_final,dim,min_ratio,p01,bits";

std::string run_bench(const BenchConfig& config);

}  // namespace l1embed
