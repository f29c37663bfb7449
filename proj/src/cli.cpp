#include "l1embed/cli.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <vector>

#include <CLI11.hpp>

#include "l1embed/basis_file.hpp"
#include "l1embed/bench.hpp"
#include "l1embed/dvoretzky.hpp"
#include "l1embed/errors.hpp"

namespace l1embed::cli {

namespace {

using nlohmann::ordered_json;

// Parameter values that parse but fall outside an operation's domain.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_open_unit(double value, const char* name) {
  if (!(value > 0.0 && value < 1.0)) {
    throw UsageError(std::string(name) + " must lie in the open interval (0, 1)");
  }
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw UsageError(std::string(name) + " must be positive");
  }
}

struct ConstantFlags {
  double c1 = 0.05;
  double c2 = 0.05;
  std::optional<double> c0;
  double c_univ = 1.0;

  void add_to(CLI::App& app) {
    app.add_option("--c1", c1, "constant of the scalar one-step bound")->capture_default_str();
    app.add_option("--c2", c2, "constant of the block one-step bound")->capture_default_str();
    app.add_option("--c0", c0, "dimension-floor constant (default: c2)");
    app.add_option("--c-univ", c_univ, "constant of the bit budget")->capture_default_str();
  }

  PipelineConfig config() const {
    require_positive(c1, "--c1");
    require_positive(c2, "--c2");
    if (c0) require_positive(*c0, "--c0");
    require_positive(c_univ, "--c-univ");
    PipelineConfig pc;
    pc.constants = {c1, c2};
    pc.dimension_constant = c0;
    pc.universal_constant = c_univ;
    return pc;
  }
};

struct Target {
  std::int64_t n = 0;
  double eps = 0.0;
  double gamma = 0.0;

  void add_to(CLI::App& app) {
    app.add_option("--N", n, "target ambient dimension (>= 16)")->required();
    app.add_option("--eps", eps, "distortion parameter in (0, 1)")->required();
    app.add_option("--gamma", gamma, "randomness exponent in (0, 1)")->required();
  }

  void validate() const {
    if (n < 16) throw UsageError("--N must be at least 16");
    require_open_unit(eps, "--eps");
    require_open_unit(gamma, "--gamma");
  }
};

// Every stdout document starts with the schema version of its layout.
constexpr int kOutputVersion = 1;

void emit(std::ostream& out, const ordered_json& doc) {
  ordered_json versioned;
  versioned["version"] = kOutputVersion;
  for (const auto& [key, value] : doc.items()) versioned[key] = value;
  out << versioned.dump() << '\n';
}

ordered_json infeasible_json(const Infeasible& e) {
  ordered_json doc;
  doc["feasible"] = false;
  doc["constraint"] = e.constraint();
  doc["message"] = e.what();
  if (e.suggested_c2()) doc["suggested_c2"] = *e.suggested_c2();
  return doc;
}

std::vector<std::uint8_t> parse_hex(std::string text) {
  if (text.starts_with("0x") || text.starts_with("0X")) text = text.substr(2);
  if (text.size() % 2 != 0) throw UsageError("--seed-hex needs an even number of hex digits");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    unsigned value = 0;
    for (std::size_t j = i; j < i + 2; ++j) {
      const char c = text[j];
      unsigned digit;
      if (c >= '0' && c <= '9') {
        digit = static_cast<unsigned>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        digit = static_cast<unsigned>(c - 'a' + 10);
      } else if (c >= 'A' && c <= 'F') {
        digit = static_cast<unsigned>(c - 'A' + 10);
      } else {
        throw UsageError("--seed-hex contains a non-hex character");
      }
      value = value * 16 + digit;
    }
    out.push_back(static_cast<std::uint8_t>(value));
  }
  return out;
}

SubspaceBasis require_orthonormal(const BasisFile& file) {
  const double residual = orthonormality_residual(file.basis);
  if (!(residual <= kOrthonormalityTolerance)) {
    throw FormatError("basis columns are not orthonormal (residual " +
                      std::to_string(residual) + ")");
  }
  return file.basis;
}

int cmd_plan(const Target& target, const ConstantFlags& constants, std::ostream& out) {
  target.validate();
  try {
    emit(out, to_json(plan(static_cast<std::size_t>(target.n), target.eps, target.gamma,
                           constants.config())));
    return kOk;
  } catch (const Infeasible& e) {
    emit(out, infeasible_json(e));
    return kInfeasible;
  }
}

struct ConstructFlags {
  std::string seed_file;
  std::string seed_hex;
  std::optional<std::size_t> seed_bits;
  std::string out_path;
  std::string format = "bin";
  unsigned retries = 0;
  std::uint64_t key = 0;
};

int cmd_construct(const Target& target, const ConstantFlags& constants,
                  const ConstructFlags& flags, std::ostream& out) {
  target.validate();
  PipelineConfig config = constants.config();
  config.retries = flags.retries;
  config.certificate_key = flags.key;
  if (flags.seed_file.empty() == flags.seed_hex.empty()) {
    throw UsageError("exactly one of --seed-file and --seed-hex is required");
  }
  std::vector<std::uint8_t> seed;
  if (!flags.seed_file.empty()) {
    const std::string raw = read_file(flags.seed_file);
    seed.assign(raw.begin(), raw.end());
  } else {
    seed = parse_hex(flags.seed_hex);
  }
  const std::size_t seed_bits = flags.seed_bits.value_or(seed.size() * 8);
  if (seed_bits > seed.size() * 8) throw UsageError("--seed-bits exceeds the seed length");
  BitStream stream = BitStream::from_bytes(seed, seed_bits);

  const auto n_target = static_cast<std::size_t>(target.n);
  ConstructionPlan p;
  try {
    p = plan(n_target, target.eps, target.gamma, config);
  } catch (const Infeasible& e) {
    emit(out, infeasible_json(e));
    return kInfeasible;
  }
  const auto shortfall = [&](std::uint64_t needed, std::uint64_t available) {
    ordered_json doc;
    doc["needed"] = needed;
    doc["available"] = available;
    emit(out, doc);
    return kBudgetShortfall;
  };
  if (stream.remaining() < p.predicted_bits) return shortfall(p.predicted_bits, stream.remaining());

  std::optional<ConstructionResult> result;
  try {
    result = construct(n_target, target.eps, target.gamma, stream, config);
  } catch (const BudgetExhausted& e) {
    return shortfall(e.needed(), e.available());
  }

  const SubspaceBasis padded = result->padded_basis();
  const BasisFile file{make_basis_header(padded, result->scaling, result->bits_consumed,
                                         certificate_json(*result)),
                       padded};
  write_file_atomic(flags.out_path,
                    flags.format == "csv" ? encode_basis_csv(file) : encode_basis(file));

  ordered_json summary;
  summary["bits_available"] = stream.size_bits();
  summary["bits_consumed"] = result->bits_consumed;
  summary["N"] = n_target;
  summary["N_final"] = result->plan.final_ambient;
  summary["m"] = result->basis.dim();
  summary["scaling_M"] = result->scaling;
  summary["out"] = flags.out_path;
  summary["format"] = flags.format;
  summary["plan"] = to_json(result->plan);
  summary["certificate"] = certificate_json(*result);
  emit(out, summary);
  return kOk;
}

struct EstimateFlags {
  std::string basis;
  std::size_t samples = 10000;
  std::size_t restarts = 8;
  std::size_t iters = 200;
  std::uint64_t key = 0;
  std::optional<double> grid;
};

int cmd_estimate(const EstimateFlags& flags, std::ostream& out, std::ostream& err) {
  if (flags.samples < 1 || flags.restarts < 1 || flags.iters < 1) {
    throw UsageError("--samples, --restarts and --iters must be >= 1");
  }
  if (flags.grid && !(*flags.grid > 0.0 && *flags.grid <= 0.1)) {
    throw UsageError("--grid must lie in (0, 0.1]");
  }
  const BasisFile file = load_basis_file(flags.basis);
  const SubspaceBasis basis = require_orthonormal(file);
  if (flags.grid && basis.dim() > 3) {
    err << "error: the grid oracle supports m <= 3, basis has m = " << basis.dim() << '\n';
    return kUnsupportedEstimator;
  }
  ordered_json doc;
  doc["m"] = basis.dim();
  doc["stats"] = to_json(sample_ratios(basis, flags.samples, flags.key));
  doc["estimate"] = to_json(minimize_ratio(basis, flags.restarts, flags.iters, flags.key));
  if (flags.grid) doc["grid"] = to_json(grid_oracle(basis, *flags.grid));
  emit(out, doc);
  return kOk;
}

int cmd_verify(const EstimateFlags& flags, std::ostream& out) {
  if (flags.samples < 1) throw UsageError("--samples must be >= 1");
  const BasisFile file = load_basis_file(flags.basis);
  const double residual = orthonormality_residual(file.basis);
  const bool orthonormal = residual <= kOrthonormalityTolerance;
  ordered_json doc;
  doc["n"] = file.basis.shape().num_blocks();
  doc["B"] = file.basis.shape().block_width();
  doc["m"] = file.basis.dim();
  doc["orthonormality_residual"] = residual;
  doc["orthonormal"] = orthonormal;
  const RatioStats stats = sample_ratios(file.basis, flags.samples, flags.key);
  doc["stats"] = to_json(stats);
  bool reproduced = true;
  // Ratios of the stored (zero-padded) basis, compared against the recorded ones.
  if (file.header.contains("certificate") && file.header["certificate"].contains("sampled")) {
    const auto& recorded = file.header["certificate"]["sampled"];
    if (recorded.contains("key") && recorded["key"] == flags.key &&
        recorded.contains("count") && recorded["count"] == flags.samples) {
      // The certificate was sampled in l1^{N_final}; padding to N only changes
      // the sqrt(n) normalization.
      const double rescale =
          std::sqrt(static_cast<double>(file.basis.shape().num_blocks()) /
                    file.header["certificate"].value("N_final", 1.0));
      doc["recorded_min"] = recorded["min"];
      reproduced = std::abs(stats.min * rescale - recorded["min"].get<double>()) <= 1e-9;
      doc["recorded_min_reproduced"] = reproduced;
    }
  }
  emit(out, doc);
  return orthonormal && reproduced ? kOk : kFailure;
}

struct MeanNormFlags {
  std::int64_t blocks = 0;
  std::int64_t width = 0;
  std::optional<std::size_t> mc;
  std::uint64_t key = 0;
};

int cmd_mean_norm(const MeanNormFlags& flags, std::ostream& out) {
  if (flags.blocks < 1 || flags.width < 1) throw UsageError("--n and --B must be >= 1");
  if (flags.mc && *flags.mc < 100) throw UsageError("--mc needs at least 100 samples");
  const BlockShape shape(static_cast<std::size_t>(flags.blocks),
                         static_cast<std::size_t>(flags.width));
  const MeanNorm m = mean_norm(shape);
  ordered_json doc;
  doc["n"] = shape.num_blocks();
  doc["B"] = shape.block_width();
  doc["closed_form"] = m.value;
  doc["bounds"] = {{"lower", m.lower_bound}, {"upper", m.upper_bound}};
  if (flags.mc) {
    const MonteCarloMean mc = mc_mean_norm(shape, *flags.mc, flags.key);
    doc["mc_count"] = *flags.mc;
    doc["mc_key"] = flags.key;
    doc["mc_mean"] = mc.mean;
    doc["mc_stderr"] = mc.standard_error;
  }
  emit(out, doc);
  return kOk;
}

int cmd_bench(const std::string& config_path, const std::string& out_path, std::ostream& out,
              std::ostream& err) {
  std::string text;
  try {
    text = read_file(config_path);
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  const auto ext = std::filesystem::path(config_path).extension();
  BenchConfig config;
  try {
    if (ext == ".toml") {
      config = parse_bench_config(text, ConfigSyntax::toml);
    } else if (ext == ".json") {
      config = parse_bench_config(text, ConfigSyntax::json);
    } else {
      try {
        config = parse_bench_config(text, ConfigSyntax::json);
      } catch (const ConfigError&) {
        config = parse_bench_config(text, ConfigSyntax::toml);
      }
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  const std::string csv = run_bench(config);
  if (out_path.empty()) {
    out << csv;
  } else {
    write_file_atomic(out_path, csv);
  }
  return kOk;
}

int cmd_make_seed(std::uint64_t index, std::size_t bytes, const std::string& out_path) {
  const auto seed = reference_seed(index, bytes);
  write_file_atomic(out_path, std::string(seed.begin(), seed.end()));
  return kOk;
}

}  // namespace

ordered_json to_json(const ConstructionPlan& p) {
  ordered_json doc;
  doc["feasible"] = true;
  doc["N"] = p.target_dim;
  doc["eps"] = p.eps;
  doc["gamma"] = p.gamma;
  doc["k"] = p.depth;
  doc["n"] = p.base_blocks;
  doc["B"] = p.base_width;
  doc["m"] = p.base_dim;
  doc["n_embed"] = p.embed_dim;
  doc["nu"] = p.block_count;
  doc["beta"] = p.block_width;
  doc["N_final"] = p.final_ambient;
  doc["predicted_dim"] = p.predicted_dim;
  doc["dimension_floor"] = p.dimension_floor;
  doc["dimension_floor_met"] = p.dimension_floor_met;
  doc["t"] = p.precision_bits;
  doc["predicted_bits"] = p.predicted_bits;
  doc["budget_bits"] = p.budget_bits;
  doc["predicted_ratio_lower"] = p.predicted_ratio_lower;
  doc["l1_interval"] = {p.l1_interval.lower, p.l1_interval.upper};
  doc["ratio_interval"] = {p.ratio_lower(), p.ratio_upper()};
  doc["scaling_M"] = p.scaling;
  doc["eps_total"] = p.eps_total;
  return doc;
}

ordered_json to_json(const RatioStats& s) {
  ordered_json doc;
  doc["count"] = s.count;
  doc["min"] = s.min;
  doc["mean"] = s.mean;
  doc["p01"] = s.p01;
  doc["p50"] = s.p50;
  doc["key"] = s.key;
  return doc;
}

ordered_json to_json(const DistortionEstimate& e) {
  ordered_json doc;
  doc["lambda_hat"] = e.lambda_hat;
  doc["method"] = to_string(e.method);
  doc["bracket_halfwidth"] = e.bracket_halfwidth;
  if (e.method == EstimateMethod::grid) {
    doc["certified_lower"] = e.lambda_hat - e.bracket_halfwidth;
  }
  doc["samples_or_iters"] = e.samples_or_iters;
  doc["witness"] = e.witness;
  return doc;
}

ordered_json certificate_json(const ConstructionResult& r) {
  ordered_json doc;
  doc["N_final"] = r.plan.final_ambient;
  doc["predicted_interval"] = {r.plan.l1_interval.lower, r.plan.l1_interval.upper};
  doc["eps_total"] = r.plan.eps_total;
  doc["ratio_interval"] = {r.plan.ratio_lower(), r.plan.ratio_upper()};
  doc["sampled"] = to_json(r.certificate.sampled);
  ordered_json witness = to_json(r.certificate.witness);
  witness.erase("witness");
  doc["witness"] = witness;
  doc["empirical_median"] = r.certificate.empirical_median;
  doc["attempts"] = r.attempts;
  return doc;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Almost-Euclidean subspaces of l1^N from a finite random bit budget", "l1embed"};
  app.require_subcommand(1);

  Target target;
  ConstantFlags constants;
  auto* plan_cmd = app.add_subcommand("plan", "derive construction parameters");
  target.add_to(*plan_cmd);
  constants.add_to(*plan_cmd);

  ConstructFlags construct_flags;
  Target construct_target;
  ConstantFlags construct_constants;
  auto* construct_cmd = app.add_subcommand("construct", "build a subspace from seed bits");
  construct_target.add_to(*construct_cmd);
  construct_constants.add_to(*construct_cmd);
  construct_cmd->add_option("--seed-file", construct_flags.seed_file, "raw seed bytes");
  construct_cmd->add_option("--seed-hex", construct_flags.seed_hex, "seed as hex digits");
  construct_cmd->add_option("--seed-bits", construct_flags.seed_bits,
                            "use only the first K bits of the seed");
  construct_cmd->add_option("--out", construct_flags.out_path, "output basis file")->required();
  construct_cmd->add_option("--format", construct_flags.format, "bin or csv")
      ->check(CLI::IsMember({"bin", "csv"}))
      ->capture_default_str();
  construct_cmd->add_option("--retries", construct_flags.retries, "verify-and-retry cap")
      ->capture_default_str();
  construct_cmd->add_option("--key", construct_flags.key, "certificate sampling key")
      ->capture_default_str();

  EstimateFlags estimate_flags;
  auto* estimate_cmd = app.add_subcommand("estimate", "estimate Lambda_1 of a basis file");
  estimate_cmd->add_option("--basis", estimate_flags.basis, "basis file")->required();
  estimate_cmd->add_option("--samples", estimate_flags.samples)->capture_default_str();
  estimate_cmd->add_option("--restarts", estimate_flags.restarts)->capture_default_str();
  estimate_cmd->add_option("--iters", estimate_flags.iters)->capture_default_str();
  estimate_cmd->add_option("--key", estimate_flags.key)->capture_default_str();
  estimate_cmd->add_option("--grid", estimate_flags.grid, "certify with a delta-net (m <= 3)");

  EstimateFlags verify_flags;
  verify_flags.samples = 10000;
  auto* verify_cmd = app.add_subcommand("verify", "check a basis file and resample its ratios");
  verify_cmd->add_option("--basis", verify_flags.basis, "basis file")->required();
  verify_cmd->add_option("--samples", verify_flags.samples)->capture_default_str();
  verify_cmd->add_option("--key", verify_flags.key)->capture_default_str();

  MeanNormFlags mean_flags;
  auto* mean_cmd = app.add_subcommand("mean-norm", "spherical mean of the block norm");
  mean_cmd->add_option("--n", mean_flags.blocks, "number of blocks")->required();
  mean_cmd->add_option("--B", mean_flags.width, "block width")->required();
  mean_cmd->add_option("--mc", mean_flags.mc, "Monte Carlo sample count");
  mean_cmd->add_option("--key", mean_flags.key)->capture_default_str();

  std::string bench_config;
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "parameter sweep to CSV");
  bench_cmd->add_option("--config", bench_config, "TOML or JSON sweep config")->required();
  bench_cmd->add_option("--out", bench_out, "write CSV here instead of stdout");

  std::uint64_t seed_index = 0;
  std::size_t seed_size = 0;
  std::string seed_out;
  auto* seed_cmd = app.add_subcommand("make-seed", "write a reference seed file");
  seed_cmd->add_option("--index", seed_index)->required();
  seed_cmd->add_option("--bytes", seed_size)->required();
  seed_cmd->add_option("--out", seed_out)->required();

  std::vector<const char*> argv{"l1embed"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kUsage;
  }

  try {
    if (plan_cmd->parsed()) return cmd_plan(target, constants, out);
    if (construct_cmd->parsed()) {
      return cmd_construct(construct_target, construct_constants, construct_flags, out);
    }
    if (estimate_cmd->parsed()) return cmd_estimate(estimate_flags, out, err);
    if (verify_cmd->parsed()) return cmd_verify(verify_flags, out);
    if (mean_cmd->parsed()) return cmd_mean_norm(mean_flags, out);
    if (bench_cmd->parsed()) return cmd_bench(bench_config, bench_out, out, err);
    if (seed_cmd->parsed()) return cmd_make_seed(seed_index, seed_size, seed_out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace l1embed::cli
