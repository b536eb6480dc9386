#include "dybm/kernels.hpp"

#include <cstdint>
#include <stdexcept>

namespace dybm {

Backend auto_backend(const ModelConfig& config) noexcept {
  // Below a few thousand pair-coefficients the fork/join overhead dominates.
  const std::size_t work = config.num_pairs() * (config.num_lambdas() + config.num_mus()) *
                           static_cast<std::size_t>(config.max_delay());
  return work >= 8192 ? Backend::kOpenMP : Backend::kSerial;
}

namespace kernels {

namespace {

inline void advance_pair(TraceState& state, const ModelConfig& config, const TimeSlice& slice,
                         std::size_t p) {
  const std::size_t nk = config.num_lambdas();
  const double arrived = state.queues[p].push(slice[config.synapse(p).pre]);
  for (std::size_t k = 0; k < nk; ++k) {
    double& a = state.alpha[p * nk + k];
    a = config.lambda(k) * a + arrived;
  }
}

inline void advance_unit(TraceState& state, const ModelConfig& config, const TimeSlice& slice,
                         std::size_t i) {
  const std::size_t nl = config.num_mus();
  for (std::size_t l = 0; l < nl; ++l) {
    double& g = state.gamma[i * nl + l];
    g = config.mu(l) * (g + slice[i]);
  }
}

inline void gradient_unit(const ModelConfig& config, const TimeSlice& observed,
                          std::span<const double> probs, Gradient& acc, std::size_t j) {
  acc.d_bias[j] += (observed[j] - probs[j]) / config.temperature();
}

inline void gradient_pair(const TraceState& state, const ModelConfig& config,
                          const TimeSlice& observed, std::span<const double> probs,
                          Gradient& acc, std::size_t p) {
  const std::size_t nk = config.num_lambdas();
  const std::size_t nl = config.num_mus();
  const double inv_tau = 1.0 / config.temperature();
  const auto& syn = config.synapse(p);
  const double err_post = observed[syn.post] - probs[syn.post];
  const double err_pre = observed[syn.pre] - probs[syn.pre];
  for (std::size_t k = 0; k < nk; ++k) {
    acc.d_u[p * nk + k] += inv_tau * state.alpha[p * nk + k] * err_post;
  }
  for (std::size_t l = 0; l < nl; ++l) {
    const double b = beta_at(state, config, p, l);
    const double g = state.gamma[syn.post * nl + l];
    acc.d_v[p * nl + l] += -inv_tau * b * err_post - inv_tau * g * err_pre;
  }
}

}  // namespace

void fire_probabilities(const Parameters& params, const TraceState& state,
                        const ModelConfig& config, std::span<double> out, Backend backend) {
  const auto n = static_cast<std::ptrdiff_t>(config.n_units());
  if (out.size() != config.n_units()) throw std::invalid_argument("fire_probabilities: bad output size");
  if (backend == Backend::kOpenMP) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      out[j] = stable_sigmoid(detail::unit_logit(params, state, config, j));
    }
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      out[j] = stable_sigmoid(detail::unit_logit(params, state, config, j));
    }
  }
}

void advance(TraceState& state, const ModelConfig& config, const TimeSlice& slice,
             Backend backend) {
  check_slice(slice, config.n_units());
  const auto m = static_cast<std::ptrdiff_t>(config.num_pairs());
  const auto n = static_cast<std::ptrdiff_t>(config.n_units());
  if (backend == Backend::kOpenMP) {
#pragma omp parallel
    {
#pragma omp for schedule(static) nowait
      for (std::ptrdiff_t p = 0; p < m; ++p) advance_pair(state, config, slice, p);
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i) advance_unit(state, config, slice, i);
    }
  } else {
    for (std::ptrdiff_t p = 0; p < m; ++p) advance_pair(state, config, slice, p);
    for (std::ptrdiff_t i = 0; i < n; ++i) advance_unit(state, config, slice, i);
  }
  ++state.step_count;
}

void accumulate_step_gradient(const TraceState& state, const ModelConfig& config,
                              const TimeSlice& observed, std::span<const double> probs,
                              Gradient& acc, Backend backend) {
  check_slice(observed, config.n_units());
  if (probs.size() != config.n_units() || !acc.matches(config)) {
    throw std::invalid_argument("accumulate_step_gradient: shape mismatch");
  }
  const auto m = static_cast<std::ptrdiff_t>(config.num_pairs());
  const auto n = static_cast<std::ptrdiff_t>(config.n_units());
  if (backend == Backend::kOpenMP) {
#pragma omp parallel
    {
#pragma omp for schedule(static) nowait
      for (std::ptrdiff_t j = 0; j < n; ++j) gradient_unit(config, observed, probs, acc, j);
#pragma omp for schedule(static)
      for (std::ptrdiff_t p = 0; p < m; ++p) gradient_pair(state, config, observed, probs, acc, p);
    }
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) gradient_unit(config, observed, probs, acc, j);
    for (std::ptrdiff_t p = 0; p < m; ++p) gradient_pair(state, config, observed, probs, acc, p);
  }
}

}  // namespace kernels

}  // namespace dybm
