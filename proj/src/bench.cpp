#include "l1embed/bench.hpp"

#include <array>
#include <charconv>
#include <sstream>

#include <json.hpp>
#include <toml.hpp>

#include "l1embed/errors.hpp"
#include "l1embed/pipeline.hpp"

namespace l1embed {

namespace {

template <class T>
std::vector<T> json_list(const nlohmann::json& doc, const char* key, std::vector<T> fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& value = doc.at(key);
  if (!value.is_array()) throw ConfigError(std::string("'") + key + "' must be a list");
  std::vector<T> out;
  for (const auto& item : value) {
    if (!item.is_number()) throw ConfigError(std::string("'") + key + "' must hold numbers");
    out.push_back(item.get<T>());
  }
  return out;
}

template <class T>
T json_scalar(const nlohmann::json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& value = doc.at(key);
  if (!value.is_number_unsigned()) {
    throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  }
  return value.get<T>();
}

BenchConfig from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("bench config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("bench config must be an object");
  BenchConfig c;
  c.targets = json_list<std::int64_t>(doc, "N", {});
  c.eps = json_list<double>(doc, "eps", {});
  c.gamma = json_list<double>(doc, "gamma", {});
  c.c1 = json_list<double>(doc, "c1", c.c1);
  c.c2 = json_list<double>(doc, "c2", c.c2);
  c.seeds = json_scalar<std::size_t>(doc, "seeds", c.seeds);
  c.seed_bytes = json_scalar<std::size_t>(doc, "seed_bytes", c.seed_bytes);
  c.samples = json_scalar<std::size_t>(doc, "samples", c.samples);
  c.restarts = json_scalar<std::size_t>(doc, "restarts", c.restarts);
  c.iters = json_scalar<std::size_t>(doc, "iters", c.iters);
  c.key = json_scalar<std::uint64_t>(doc, "key", c.key);
  return c;
}

template <class T>
std::vector<T> toml_list(const toml::table& doc, const char* key, std::vector<T> fallback) {
  const toml::node* node = doc.get(key);
  if (node == nullptr) return fallback;
  const toml::array* arr = node->as_array();
  if (arr == nullptr) throw ConfigError(std::string("'") + key + "' must be a list");
  std::vector<T> out;
  for (const toml::node& item : *arr) {
    if constexpr (std::is_integral_v<T>) {
      const auto v = item.value<std::int64_t>();
      if (!v || !item.is_integer()) throw ConfigError(std::string("'") + key + "' must hold integers");
      out.push_back(static_cast<T>(*v));
    } else {
      const auto v = item.value<double>();
      if (!v) throw ConfigError(std::string("'") + key + "' must hold numbers");
      out.push_back(*v);
    }
  }
  return out;
}

template <class T>
T toml_scalar(const toml::table& doc, const char* key, T fallback) {
  const toml::node* node = doc.get(key);
  if (node == nullptr) return fallback;
  const auto v = node->is_integer() ? node->value<std::int64_t>() : std::nullopt;
  if (!v || *v < 0) throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  return static_cast<T>(*v);
}

BenchConfig from_toml(std::string_view text) {
  toml::table doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string("bench config is not valid TOML: ") +
                      std::string(e.description()));
  }
  BenchConfig c;
  c.targets = toml_list<std::int64_t>(doc, "N", {});
  c.eps = toml_list<double>(doc, "eps", {});
  c.gamma = toml_list<double>(doc, "gamma", {});
  c.c1 = toml_list<double>(doc, "c1", c.c1);
  c.c2 = toml_list<double>(doc, "c2", c.c2);
  c.seeds = toml_scalar<std::size_t>(doc, "seeds", c.seeds);
  c.seed_bytes = toml_scalar<std::size_t>(doc, "seed_bytes", c.seed_bytes);
  c.samples = toml_scalar<std::size_t>(doc, "samples", c.samples);
  c.restarts = toml_scalar<std::size_t>(doc, "restarts", c.restarts);
  c.iters = toml_scalar<std::size_t>(doc, "iters", c.iters);
  c.key = toml_scalar<std::uint64_t>(doc, "key", c.key);
  return c;
}

void validate(const BenchConfig& c) {
  for (auto n : c.targets) {
    if (n < 16) throw ConfigError("every N must be >= 16");
  }
  const auto open_unit = [](const std::vector<double>& values, const char* name) {
    for (double v : values) {
      if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string(name) + " values must lie in (0, 1)");
    }
  };
  open_unit(c.eps, "eps");
  open_unit(c.gamma, "gamma");
  for (const auto* list : {&c.c1, &c.c2}) {
    for (double v : *list) {
      if (!(v > 0.0)) throw ConfigError("c1 and c2 values must be positive");
    }
  }
  if (c.samples < 1 || c.restarts < 1 || c.iters < 1) {
    throw ConfigError("samples, restarts and iters must be >= 1");
  }
}

std::string shortest(double v) {
  std::array<char, 32> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), v);
  return std::string(buffer.data(), result.ptr);
}

}  // namespace

BenchConfig parse_bench_config(std::string_view text, ConfigSyntax syntax) {
  BenchConfig c = syntax == ConfigSyntax::json ? from_json(text) : from_toml(text);
  validate(c);
  return c;
}

std::vector<std::uint8_t> reference_seed(std::uint64_t index, std::size_t size) {
  std::vector<std::uint8_t> out;
  out.reserve(size);
  std::uint64_t state = index;
  while (out.size() < size) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    for (int shift = 56; shift >= 0 && out.size() < size; shift -= 8) {
      out.push_back(static_cast<std::uint8_t>(z >> shift));
    }
  }
  return out;
}

std::string run_bench(const BenchConfig& config) {
  std::ostringstream csv;
  csv << kBenchCsvHeader << '\n';
  for (auto target : config.targets) {
    for (double eps : config.eps) {
      for (double gamma : config.gamma) {
        for (double c1 : config.c1) {
          for (double c2 : config.c2) {
            PipelineConfig pc;
            pc.constants = {c1, c2};
            pc.certificate_key = config.key;
            pc.certificate_samples = config.samples;
            pc.minimizer_restarts = config.restarts;
            pc.minimizer_iters = config.iters;
            const std::string params = std::to_string(target) + ',' + shortest(eps) + ',' +
                                       shortest(gamma) + ',' + shortest(c1) + ',' + shortest(c2);
            for (std::size_t seed = 0; seed < config.seeds; ++seed) {
              csv << seed << ',' << params << ',';
              try {
                const auto bytes = reference_seed(seed, config.seed_bytes);
                BitStream stream = BitStream::from_bytes(bytes);
                const auto r = construct(static_cast<std::size_t>(target), eps, gamma, stream, pc);
                const auto& p = r.plan;
                csv << "ok," << p.depth << ',' << p.base_blocks << ',' << p.base_width << ','
                    << p.base_dim << ',' << p.embed_dim << ',' << p.final_ambient << ','
                    << r.basis.dim() << ',' << shortest(r.certificate.witness.lambda_hat) << ','
                    << shortest(r.certificate.sampled.p01) << ',' << r.bits_consumed;
              } catch (const Infeasible& e) {
                csv << "infeasible:" << e.constraint() << ",,,,,,,,,,";
              } catch (const BudgetExhausted&) {
                csv << "budget_exhausted,,,,,,,,,,";
              } catch (const DegenerateRandomness&) {
                csv << "degenerate,,,,,,,,,,";
              }
              csv << '\n';
            }
          }
        }
      }
    }
  }
  return csv.str();
}

}  // namespace l1embed
