#include "dybm/generator.hpp"

#include <stdexcept>

namespace dybm {

TimeSlice sample_step(const Parameters& params, const TraceState& state,
                      const ModelConfig& config, Rng& rng) {
  TimeSlice out(config.n_units(), 0);
  for (std::size_t j = 0; j < config.n_units(); ++j) {
    out[j] = rng.bernoulli(fire_prob(params, state, config, j)) ? 1 : 0;
  }
  return out;
}

TimeSlice argmax_step(const Parameters& params, const TraceState& state,
                      const ModelConfig& config) {
  TimeSlice out(config.n_units(), 0);
  for (std::size_t j = 0; j < config.n_units(); ++j) {
    out[j] = fire_prob(params, state, config, j) > 0.5 ? 1 : 0;
  }
  return out;
}

Series rollout(const Parameters& params, const ModelConfig& config, const RolloutConfig& cfg,
               const std::optional<TraceState>& initial) {
  if (cfg.horizon == 0) throw std::invalid_argument("rollout: horizon must be at least 1");
  if (!params.matches(config)) throw std::invalid_argument("rollout: parameters do not match config");
  TraceState state = initial ? *initial : init_state(config);
  if (!state.matches(config)) throw std::invalid_argument("rollout: state does not match config");
  for (const auto& slice : cfg.primer) advance(state, config, slice);

  Series out;
  out.reserve(cfg.horizon);
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    TimeSlice next;
    if (cfg.mode == RolloutMode::kSample) {
      Rng rng = Rng::for_step(cfg.seed, t);
      next = sample_step(params, state, config, rng);
    } else {
      next = argmax_step(params, state, config);
    }
    advance(state, config, next);
    out.push_back(std::move(next));
  }
  return out;
}

PredictionMetrics eval_prediction(const Parameters& params, const ModelConfig& config,
                                  const Series& series) {
  if (series.empty()) throw std::invalid_argument("eval_prediction: empty series");
  if (!params.matches(config)) throw std::invalid_argument("eval_prediction: parameters do not match config");
  PredictionMetrics m;
  TraceState state = init_state(config);
  std::size_t correct = 0;
  for (const auto& slice : series) {
    m.log_likelihood += cond_prob(params, state, config, slice).log_prob;
    const TimeSlice guess = argmax_step(params, state, config);
    for (std::size_t j = 0; j < slice.size(); ++j) correct += guess[j] == slice[j] ? 1 : 0;
    advance(state, config, slice);
  }
  m.steps = series.size();
  const double bits = static_cast<double>(series.size() * config.n_units());
  m.nll_per_bit = -m.log_likelihood / bits;
  m.accuracy = static_cast<double>(correct) / bits;
  return m;
}

}  // namespace dybm
