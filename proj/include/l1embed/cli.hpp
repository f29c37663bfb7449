#pragma once

#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "l1embed/distortion.hpp"
#include "l1embed/pipeline.hpp"

namespace l1embed::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInfeasible = 2,
  kBudgetShortfall = 3,
  kUnsupportedEstimator = 4,
  kUsage = 64,
};

// Runs one command. `args` excludes the program name.
//
//   plan       --N --eps --gamma [--c1 --c2 --c0 --c-univ]
//   construct  --N --eps --gamma (--seed-file P | --seed-hex H) [--seed-bits K]
//              --out P [--format bin|csv] [--retries R] [--key K] [constants]
//   estimate   --basis P [--samples S --restarts R --iters I --key K --grid D]
//   verify     --basis P [--samples S --key K]
//   mean-norm  --n --B [--mc COUNT --key K]
//   bench      --config P [--out P]
//   make-seed  --index I --bytes S --out P
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

nlohmann::ordered_json to_json(const ConstructionPlan& plan);
nlohmann::ordered_json to_json(const RatioStats& stats);
nlohmann::ordered_json to_json(const DistortionEstimate& estimate);
nlohmann::ordered_json certificate_json(const ConstructionResult& result);

}  // namespace l1embed::cli
