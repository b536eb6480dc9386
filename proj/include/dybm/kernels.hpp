#pragma once

#include <cstddef>
#include <span>

#include "dybm/config.hpp"
#include "dybm/model.hpp"
#include "dybm/parameters.hpp"

namespace dybm {

/// Execution policy for the per-step kernels.
///
/// kSerial is the reference path. kOpenMP splits the per-unit and per-pair
/// loops across threads; every output element is written by exactly one
/// iteration and each element's arithmetic is identical to the serial path,
/// so both backends produce bit-identical results.
enum class Backend { kSerial, kOpenMP };

/// kOpenMP when the network is large enough for threading to pay off.
Backend auto_backend(const ModelConfig& config) noexcept;

namespace kernels {

/// Next-step firing probability of every unit.
void fire_probabilities(const Parameters& params, const TraceState& state,
                        const ModelConfig& config, std::span<double> out, Backend backend);

/// Absorbs one slice into the traces and queues.
void advance(TraceState& state, const ModelConfig& config, const TimeSlice& slice,
             Backend backend);

/// acc += gradient of log P(observed | history) given precomputed `probs`.
void accumulate_step_gradient(const TraceState& state, const ModelConfig& config,
                              const TimeSlice& observed, std::span<const double> probs,
                              Gradient& acc, Backend backend);

namespace detail {

/// b_j + sum over incoming pairs (u.alpha - v.beta) - sum over outgoing
/// pairs v.gamma_post, accumulated in canonical pair order.
inline double unit_drive(const Parameters& params, const TraceState& state,
                         const ModelConfig& config, std::size_t j) {
  const std::size_t nk = config.num_lambdas();
  const std::size_t nl = config.num_mus();
  double drive = params.bias[j];
  for (std::size_t p : config.incoming(j)) {
    for (std::size_t k = 0; k < nk; ++k) drive += params.u[p * nk + k] * state.alpha[p * nk + k];
    for (std::size_t l = 0; l < nl; ++l) drive -= params.v[p * nl + l] * beta_at(state, config, p, l);
  }
  for (std::size_t p : config.outgoing(j)) {
    const std::size_t i = config.synapse(p).post;
    for (std::size_t l = 0; l < nl; ++l) drive -= params.v[p * nl + l] * state.gamma[i * nl + l];
  }
  return drive;
}

inline double unit_logit(const Parameters& params, const TraceState& state,
                         const ModelConfig& config, std::size_t j) {
  return unit_drive(params, state, config, j) / config.temperature();
}

}  // namespace detail

}  // namespace kernels

}  // namespace dybm
