#include "dybm/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dybm/kernels.hpp"

namespace dybm {

std::size_t TraceState::queue_bits() const noexcept {
  std::size_t bits = 0;
  for (const auto& q : queues) bits += q.size();
  return bits;
}

bool TraceState::matches(const ModelConfig& config) const {
  if (alpha.size() != config.num_pairs() * config.num_lambdas()) return false;
  if (gamma.size() != config.n_units() * config.num_mus()) return false;
  if (queues.size() != config.num_pairs()) return false;
  for (std::size_t p = 0; p < queues.size(); ++p) {
    if (queues[p].size() != static_cast<std::size_t>(config.synapse(p).delay - 1)) return false;
  }
  return true;
}

TraceState init_state(const ModelConfig& config) {
  TraceState s;
  s.alpha.assign(config.num_pairs() * config.num_lambdas(), 0.0);
  s.gamma.assign(config.n_units() * config.num_mus(), 0.0);
  s.queues.reserve(config.num_pairs());
  for (const auto& syn : config.synapses()) {
    s.queues.emplace_back(static_cast<std::size_t>(syn.delay - 1));
  }
  return s;
}

void advance(TraceState& state, const ModelConfig& config, const TimeSlice& slice) {
  kernels::advance(state, config, slice, Backend::kSerial);
}

double beta_at(const TraceState& state, const ModelConfig& config, std::size_t p, std::size_t l) {
  const DelayLine& q = state.queues[p];
  double sum = 0.0;
  for (std::size_t lag = 1; lag <= q.size(); ++lag) {
    if (q.lag(lag)) sum += config.inverse_mu_power(l, static_cast<int>(lag));
  }
  return sum;
}

double beta(const TraceState& state, const ModelConfig& config, std::size_t pre,
            std::size_t post, std::size_t l) {
  const auto p = config.pair_index(pre, post);
  if (!p) {
    throw std::out_of_range("beta: pair (" + std::to_string(pre) + "," + std::to_string(post) +
                            ") is not connected");
  }
  if (l >= config.num_mus()) throw std::out_of_range("beta: mu index out of range");
  return beta_at(state, config, *p, l);
}

double firing_logit(const Parameters& params, const TraceState& state, const ModelConfig& config,
                    std::size_t j) {
  return kernels::detail::unit_logit(params, state, config, j);
}

double unit_energy(const Parameters& params, const TraceState& state, const ModelConfig& config,
                   std::size_t j, std::uint8_t x_j) {
  if (j >= config.n_units()) throw std::out_of_range("unit_energy: unit index out of range");
  if (x_j == 0) return 0.0;
  return -kernels::detail::unit_drive(params, state, config, j);
}

double stable_sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sigmoid(double z) noexcept {
  // log(1/(1+e^-z)) = -log1p(e^-z) for z >= 0, z - log1p(e^z) otherwise.
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

double fire_prob(const Parameters& params, const TraceState& state, const ModelConfig& config,
                 std::size_t j) {
  if (j >= config.n_units()) throw std::out_of_range("fire_prob: unit index out of range");
  return stable_sigmoid(firing_logit(params, state, config, j));
}

SliceProbability cond_prob(const Parameters& params, const TraceState& state,
                           const ModelConfig& config, const TimeSlice& slice) {
  check_slice(slice, config.n_units());
  SliceProbability out;
  for (std::size_t j = 0; j < config.n_units(); ++j) {
    const double z = firing_logit(params, state, config, j);
    if (slice[j]) {
      out.prob *= stable_sigmoid(z);
      out.log_prob += log_sigmoid(z);
    } else {
      out.prob *= stable_sigmoid(-z);
      out.log_prob += log_sigmoid(-z);
    }
  }
  return out;
}

namespace testing {

void advance_with_printed_alpha_recursion(TraceState& state, const ModelConfig& config,
                                          const TimeSlice& slice) {
  check_slice(slice, config.n_units());
  const std::size_t nk = config.num_lambdas();
  for (std::size_t p = 0; p < config.num_pairs(); ++p) {
    const double e = state.queues[p].push(slice[config.synapse(p).pre]);
    for (std::size_t k = 0; k < nk; ++k) {
      double& a = state.alpha[p * nk + k];
      a = config.lambda(k) * (a + e);
    }
  }
  const std::size_t nl = config.num_mus();
  for (std::size_t i = 0; i < config.n_units(); ++i) {
    for (std::size_t l = 0; l < nl; ++l) {
      double& g = state.gamma[i * nl + l];
      g = config.mu(l) * (g + slice[i]);
    }
  }
  ++state.step_count;
}

}  // namespace testing

}  // namespace dybm
