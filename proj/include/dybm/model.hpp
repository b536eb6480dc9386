#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dybm/config.hpp"
#include "dybm/delay_line.hpp"
#include "dybm/parameters.hpp"

namespace dybm {

/// Everything the network remembers about the past.
///
/// alpha[p*|K|+k]  spikes of pre(p) that already reached post(p), decayed by lambda_k
/// gamma[i*|L|+l]  spikes emitted by unit i, decayed by mu_l
/// queues[p]       spikes of pre(p) still in transit (d_p - 1 bits)
///
/// The in-transit trace (beta) is never stored; see beta().
struct TraceState {
  std::vector<double> alpha;
  std::vector<double> gamma;
  std::vector<DelayLine> queues;
  std::size_t step_count = 0;

  double alpha_at(const ModelConfig& c, std::size_t p, std::size_t k) const {
    return alpha[p * c.num_lambdas() + k];
  }
  double gamma_at(const ModelConfig& c, std::size_t i, std::size_t l) const {
    return gamma[i * c.num_mus() + l];
  }

  /// Stored real scalars (alpha + gamma).
  std::size_t real_count() const noexcept { return alpha.size() + gamma.size(); }
  /// Stored spike bits across all queues.
  std::size_t queue_bits() const noexcept;

  bool matches(const ModelConfig& config) const;

  friend bool operator==(const TraceState&, const TraceState&) = default;
};

/// State equivalent to an infinite all-zero history.
TraceState init_state(const ModelConfig& config);

/// Absorbs one observed slice: alpha <- lambda*alpha + (spike leaving the
/// queue), gamma <- mu*(gamma + x), queue push/evict. Throws
/// std::invalid_argument on a malformed slice.
void advance(TraceState& state, const ModelConfig& config, const TimeSlice& slice);

/// In-transit trace sum_{delta=1}^{d-1} mu_l^(-delta) * x_pre[-delta],
/// recomputed from the queue on every call. Throws std::out_of_range if
/// (pre, post) is not connected.
double beta(const TraceState& state, const ModelConfig& config, std::size_t pre,
            std::size_t post, std::size_t l);
/// Same, addressed by canonical pair index.
double beta_at(const TraceState& state, const ModelConfig& config, std::size_t p, std::size_t l);

/// Energy of unit j taking value x_j given the history summarised by `state`.
/// Zero whenever x_j == 0.
double unit_energy(const Parameters& params, const TraceState& state, const ModelConfig& config,
                   std::size_t j, std::uint8_t x_j);

/// -E_j(1)/tau, the log-odds of unit j firing.
double firing_logit(const Parameters& params, const TraceState& state, const ModelConfig& config,
                    std::size_t j);

/// Logistic function evaluated without overflow for any finite input.
double stable_sigmoid(double z) noexcept;
/// log(sigmoid(z)) without underflow to -inf for moderate negative z.
double log_sigmoid(double z) noexcept;

/// Probability that unit j fires at the next step.
double fire_prob(const Parameters& params, const TraceState& state, const ModelConfig& config,
                 std::size_t j);

struct SliceProbability {
  double prob = 1.0;
  double log_prob = 0.0;
};

/// P(slice | history) as the product of independent per-unit Bernoullis,
/// together with its log.
SliceProbability cond_prob(const Parameters& params, const TraceState& state,
                           const ModelConfig& config, const TimeSlice& slice);

namespace testing {
/// Mutant of advance() applying alpha <- lambda*(alpha + e) instead of the
/// definition-consistent update. Used to check the validation suite catches it.
void advance_with_printed_alpha_recursion(TraceState& state, const ModelConfig& config,
                                          const TimeSlice& slice);
}  // namespace testing

}  // namespace dybm
