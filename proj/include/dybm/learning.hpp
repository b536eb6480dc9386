#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dybm/config.hpp"
#include "dybm/kernels.hpp"
#include "dybm/model.hpp"
#include "dybm/parameters.hpp"

namespace dybm {

/// Gradient of log P(observed | history) for the history held in `state`.
/// Does not modify the state.
Gradient step_gradient(const Parameters& params, const TraceState& state,
                       const ModelConfig& config, const TimeSlice& observed,
                       Backend backend = Backend::kSerial);

/// Sum of per-step log conditionals, starting from zero history.
/// Throws std::invalid_argument on an empty series.
double sequence_log_likelihood(const Parameters& params, const ModelConfig& config,
                               const Series& series);

/// Gradient of sequence_log_likelihood.
Gradient sequence_gradient(const Parameters& params, const ModelConfig& config,
                           const Series& series, Backend backend = Backend::kSerial);

struct SequenceEvaluation {
  double log_likelihood = 0.0;
  Gradient gradient;
};

/// Log-likelihood and its gradient in a single pass over the series.
SequenceEvaluation evaluate_sequence(const Parameters& params, const ModelConfig& config,
                                     const Series& series, Backend backend = Backend::kSerial);

/// Sum over series of evaluate_sequence. Series are evaluated independently
/// (each from zero history) and reduced in dataset order, so the result does
/// not depend on the backend.
SequenceEvaluation evaluate_dataset(const Parameters& params, const ModelConfig& config,
                                    const std::vector<Series>& dataset,
                                    Backend backend = Backend::kSerial);

/// params + eta * grad. Throws std::invalid_argument on shape mismatch and
/// DivergenceError if the result is not finite.
Parameters sgd_update(const Parameters& params, const Gradient& grad, double eta);

enum class TrainMode { kOnline, kFullBatch };

struct TrainerConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 100;
  TrainMode mode = TrainMode::kFullBatch;
  /// Online mode only: permute the order of series within each epoch.
  std::optional<std::uint64_t> shuffle_seed;
  /// Abort when any parameter magnitude exceeds this.
  double divergence_limit = 1e6;
  Backend backend = Backend::kSerial;

  void validate() const;
};

/// One metrics record. Epoch 0 describes the initial parameters; epoch e the
/// parameters after e epochs. `step` counts parameter updates so far.
struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double log_likelihood = 0.0;
  double grad_norm = 0.0;
  double wall_ms = 0.0;
};

struct TrainMetrics {
  std::vector<EpochRecord> epochs;
  /// Online mode: -log P of each observed slice under the parameters in force
  /// just before that slice's update.
  std::vector<double> step_nll;
};

struct TrainResult {
  Parameters params;
  TrainMetrics metrics;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Gradient-ascent training on a dataset of series. Deterministic given its
/// inputs. Throws DivergenceError (with epoch/step) if parameters blow up.
TrainResult train(Parameters params, const ModelConfig& config, const std::vector<Series>& dataset,
                  const TrainerConfig& trainer, const EpochCallback& on_epoch = {});

}  // namespace dybm
