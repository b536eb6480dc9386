#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dybm/config.hpp"
#include "dybm/model.hpp"
#include "dybm/parameters.hpp"

namespace dybm {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  ModelConfig config;
  Parameters params;
  std::optional<TraceState> state;
};

/// Serialises with every real printed to 17 significant digits, so
/// load_checkpoint(save_checkpoint(c)) reproduces c bit for bit.
std::string save_checkpoint(const ModelConfig& config, const Parameters& params,
                            const TraceState* state = nullptr);

/// Throws ParseError on malformed or wrong-version documents and ConfigError
/// when the embedded configuration is invalid.
Checkpoint load_checkpoint(std::string_view document);

void write_checkpoint_file(const std::filesystem::path& path, const ModelConfig& config,
                           const Parameters& params, const TraceState* state = nullptr);
Checkpoint read_checkpoint_file(const std::filesystem::path& path);

/// Model section shared by checkpoints and run configs:
/// {n_units, temperature, lambdas, mus, connectivity: [[pre, post, delay], ...]}.
/// In a run config every field is optional: connectivity defaults to dense
/// with `delay` (default 2), n_units falls back to `n_units_hint`.
ModelConfig model_config_from_json(const nlohmann::json& j, bool allow_defaults,
                                   std::optional<std::size_t> n_units_hint = std::nullopt);
nlohmann::ordered_json model_config_to_json(const ModelConfig& config);

/// JSON text with reals printed as %.17g. Keys keep insertion order.
std::string dump_json(const nlohmann::ordered_json& value, int indent = 2);

/// Series CSV: a header row (u0,u1,...) then one row of 0/1 per time step.
/// Throws ParseError naming the row and column of the first bad cell.
Series read_series_csv(std::istream& in, const std::string& source = "<stream>");
Series read_series_file(const std::filesystem::path& path);
void write_series_csv(std::ostream& out, const Series& series);

}  // namespace dybm
