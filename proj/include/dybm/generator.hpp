#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "dybm/config.hpp"
#include "dybm/model.hpp"
#include "dybm/parameters.hpp"
#include "dybm/rng.hpp"

namespace dybm {

enum class RolloutMode { kSample, kArgmax };

struct RolloutConfig {
  std::size_t horizon = 1;
  RolloutMode mode = RolloutMode::kArgmax;
  /// Ignored in argmax mode.
  std::uint64_t seed = 0;
  /// Absorbed before generation starts.
  Series primer;
};

/// Draws the next slice: unit j is 1 with probability fire_prob(j). Draws are
/// consumed from `rng` in ascending unit order. The state is not advanced.
TimeSlice sample_step(const Parameters& params, const TraceState& state,
                      const ModelConfig& config, Rng& rng);

/// Most likely next slice. A probability of exactly 0.5 predicts 0.
TimeSlice argmax_step(const Parameters& params, const TraceState& state,
                      const ModelConfig& config);

/// Autoregressive generation of `horizon` slices. Starts from `initial` (or
/// zero history), absorbs the primer, then repeatedly produces a slice and
/// feeds it back. Slice t of the output is sampled from Rng::for_step(seed, t).
/// Throws std::invalid_argument when horizon is 0.
Series rollout(const Parameters& params, const ModelConfig& config, const RolloutConfig& cfg,
               const std::optional<TraceState>& initial = std::nullopt);

struct PredictionMetrics {
  double log_likelihood = 0.0;
  /// -log_likelihood / (steps * units)
  double nll_per_bit = 0.0;
  /// Fraction of bits matched by argmax_step.
  double accuracy = 0.0;
  std::size_t steps = 0;
};

/// Walks the series from zero history, scoring each slice against the
/// prediction made from the history before it.
PredictionMetrics eval_prediction(const Parameters& params, const ModelConfig& config,
                                  const Series& series);

}  // namespace dybm
