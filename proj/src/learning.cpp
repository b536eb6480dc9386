#include "dybm/learning.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dybm/errors.hpp"
#include "dybm/rng.hpp"

namespace dybm {

namespace {

// Taken from the logit rather than log(p) so saturated units keep precision.
double slice_log_prob(const TimeSlice& slice, const Parameters& params, const TraceState& state,
                      const ModelConfig& config) {
  double lp = 0.0;
  for (std::size_t j = 0; j < slice.size(); ++j) {
    const double z = firing_logit(params, state, config, j);
    lp += slice[j] ? log_sigmoid(z) : log_sigmoid(-z);
  }
  return lp;
}

void require_series(const Series& series, const ModelConfig& config) {
  if (series.empty()) throw std::invalid_argument("series must contain at least one slice");
  for (const auto& s : series) check_slice(s, config.n_units());
}

void check_divergence(const Parameters& params, double limit, std::size_t epoch,
                      std::size_t step) {
  if (!params.all_finite()) {
    throw DivergenceError("non-finite parameter at epoch " + std::to_string(epoch) + ", step " +
                              std::to_string(step),
                          epoch, step);
  }
  const double m = params.max_abs();
  if (m > limit) {
    throw DivergenceError("parameter magnitude " + std::to_string(m) + " exceeds " +
                              std::to_string(limit) + " at epoch " + std::to_string(epoch) +
                              ", step " + std::to_string(step),
                          epoch, step);
  }
}

}  // namespace

Gradient step_gradient(const Parameters& params, const TraceState& state,
                       const ModelConfig& config, const TimeSlice& observed, Backend backend) {
  check_slice(observed, config.n_units());
  std::vector<double> probs(config.n_units());
  kernels::fire_probabilities(params, state, config, probs, backend);
  Gradient g = Gradient::zeros(config);
  kernels::accumulate_step_gradient(state, config, observed, probs, g, backend);
  return g;
}

SequenceEvaluation evaluate_sequence(const Parameters& params, const ModelConfig& config,
                                     const Series& series, Backend backend) {
  require_series(series, config);
  if (!params.matches(config)) throw std::invalid_argument("parameters do not match config");
  SequenceEvaluation out{0.0, Gradient::zeros(config)};
  TraceState state = init_state(config);
  std::vector<double> probs(config.n_units());
  for (const auto& slice : series) {
    kernels::fire_probabilities(params, state, config, probs, backend);
    out.log_likelihood += slice_log_prob(slice, params, state, config);
    kernels::accumulate_step_gradient(state, config, slice, probs, out.gradient, backend);
    kernels::advance(state, config, slice, backend);
  }
  return out;
}

double sequence_log_likelihood(const Parameters& params, const ModelConfig& config,
                               const Series& series) {
  require_series(series, config);
  if (!params.matches(config)) throw std::invalid_argument("parameters do not match config");
  TraceState state = init_state(config);
  double ll = 0.0;
  for (const auto& slice : series) {
    ll += cond_prob(params, state, config, slice).log_prob;
    advance(state, config, slice);
  }
  return ll;
}

Gradient sequence_gradient(const Parameters& params, const ModelConfig& config,
                           const Series& series, Backend backend) {
  return evaluate_sequence(params, config, series, backend).gradient;
}

SequenceEvaluation evaluate_dataset(const Parameters& params, const ModelConfig& config,
                                    const std::vector<Series>& dataset, Backend backend) {
  if (dataset.empty()) throw std::invalid_argument("dataset must contain at least one series");
  std::vector<SequenceEvaluation> parts(dataset.size());
  const auto count = static_cast<std::ptrdiff_t>(dataset.size());
  if (backend == Backend::kOpenMP && dataset.size() > 1) {
    // One series per thread; the per-step kernels run serially inside.
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      parts[s] = evaluate_sequence(params, config, dataset[s], Backend::kSerial);
    }
  } else {
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      parts[s] = evaluate_sequence(params, config, dataset[s], backend);
    }
  }
  SequenceEvaluation total{0.0, Gradient::zeros(config)};
  for (const auto& part : parts) {
    total.log_likelihood += part.log_likelihood;
    total.gradient += part.gradient;
  }
  return total;
}

Parameters sgd_update(const Parameters& params, const Gradient& grad, double eta) {
  if (params.bias.size() != grad.d_bias.size() || params.u.size() != grad.d_u.size() ||
      params.v.size() != grad.d_v.size()) {
    throw std::invalid_argument("sgd_update: gradient shape does not match parameters");
  }
  Parameters out = params;
  for (std::size_t n = 0; n < out.bias.size(); ++n) out.bias[n] += eta * grad.d_bias[n];
  for (std::size_t n = 0; n < out.u.size(); ++n) out.u[n] += eta * grad.d_u[n];
  for (std::size_t n = 0; n < out.v.size(); ++n) out.v[n] += eta * grad.d_v[n];
  if (!out.all_finite()) throw DivergenceError("sgd_update produced a non-finite parameter", 0, 0);
  return out;
}

void TrainerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate: must be a positive finite number");
  }
  if (!(divergence_limit > 0.0)) throw ConfigError("divergence_limit: must be positive");
}

TrainResult train(Parameters params, const ModelConfig& config, const std::vector<Series>& dataset,
                  const TrainerConfig& trainer, const EpochCallback& on_epoch) {
  trainer.validate();
  if (!params.matches(config)) throw std::invalid_argument("parameters do not match config");
  if (dataset.empty()) throw std::invalid_argument("dataset must contain at least one series");
  for (const auto& series : dataset) require_series(series, config);

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  TrainResult result{std::move(params), {}};
  auto& metrics = result.metrics;
  std::size_t updates = 0;

  auto record = [&](std::size_t epoch, const SequenceEvaluation& eval) {
    EpochRecord rec{epoch, updates, eval.log_likelihood, eval.gradient.norm(), elapsed_ms()};
    metrics.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  };

  if (trainer.mode == TrainMode::kFullBatch) {
    auto eval = evaluate_dataset(result.params, config, dataset, trainer.backend);
    for (std::size_t epoch = 1; epoch <= trainer.epochs; ++epoch) {
      record(epoch - 1, eval);
      ++updates;
      try {
        result.params = sgd_update(result.params, eval.gradient, trainer.learning_rate);
      } catch (const DivergenceError&) {
        throw DivergenceError("non-finite parameter at epoch " + std::to_string(epoch) +
                                  ", step " + std::to_string(updates),
                              epoch, updates);
      }
      check_divergence(result.params, trainer.divergence_limit, epoch, updates);
      eval = evaluate_dataset(result.params, config, dataset, trainer.backend);
    }
    record(trainer.epochs, eval);
    return result;
  }

  record(0, evaluate_dataset(result.params, config, dataset, trainer.backend));
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::optional<Rng> shuffler;
  if (trainer.shuffle_seed) shuffler.emplace(*trainer.shuffle_seed);
  std::vector<double> probs(config.n_units());

  for (std::size_t epoch = 1; epoch <= trainer.epochs; ++epoch) {
    if (shuffler) shuffler->shuffle(order);
    for (std::size_t s : order) {
      TraceState state = init_state(config);
      for (const auto& slice : dataset[s]) {
        kernels::fire_probabilities(result.params, state, config, probs, trainer.backend);
        metrics.step_nll.push_back(-slice_log_prob(slice, result.params, state, config));
        Gradient g = Gradient::zeros(config);
        kernels::accumulate_step_gradient(state, config, slice, probs, g, trainer.backend);
        ++updates;
        try {
          result.params = sgd_update(result.params, g, trainer.learning_rate);
        } catch (const DivergenceError&) {
          throw DivergenceError("non-finite parameter at epoch " + std::to_string(epoch) +
                                    ", step " + std::to_string(updates),
                                epoch, updates);
        }
        check_divergence(result.params, trainer.divergence_limit, epoch, updates);
        kernels::advance(state, config, slice, trainer.backend);
      }
    }
    record(epoch, evaluate_dataset(result.params, config, dataset, trainer.backend));
  }
  return result;
}

}  // namespace dybm
