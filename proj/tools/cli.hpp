#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "dybm/config.hpp"
#include "dybm/generator.hpp"
#include "dybm/learning.hpp"

namespace dybm::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidationFailed = 1;
inline constexpr int kBadInput = 2;
inline constexpr int kDiverged = 3;

/// Parsed run configuration file:
/// {"model": {...}, "trainer": {...}, "generation": {...}}, every section optional.
struct RunConfig {
  nlohmann::json model = nlohmann::json::object();
  TrainerConfig trainer;
  RolloutConfig generation{32, RolloutMode::kArgmax, 0, {}};
};

/// Throws ParseError / ConfigError on unknown keys or bad values.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig read_run_config_file(const std::string& path);

/// Entry point shared by the executable and the tests. Metrics, reports,
/// checkpoints-on-stdout and CSV go to `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dybm::cli
