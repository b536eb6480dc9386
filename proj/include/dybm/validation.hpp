#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dybm/config.hpp"
#include "dybm/model.hpp"
#include "dybm/parameters.hpp"
#include "dybm/rng.hpp"

namespace dybm::validation {

/// Outcome of one oracle property. `max_error` is in the property's own
/// metric (see each checker); the property passes when it is <= tolerance.
struct PropertyResult {
  std::string name;
  bool passed = false;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::size_t instances = 0;
  std::string detail;
};

using AdvanceFn = std::function<void(TraceState&, const ModelConfig&, const TimeSlice&)>;

struct RandomConfigSpec {
  std::size_t max_units = 3;
  int max_delay = 5;
  std::size_t max_lambdas = 2;
  std::size_t max_mus = 2;
  double rate_lo = 0.1;
  double rate_hi = 0.9;
  double connect_prob = 0.7;
};

ModelConfig random_config(Rng& rng, const RandomConfigSpec& spec);
Parameters random_parameters(Rng& rng, const ModelConfig& config, double bias_scale,
                             double weight_scale);
Series random_series(Rng& rng, std::size_t n_units, std::size_t length, double p_one = 0.5);

/// Incremental traces vs literal definitions; metric is max absolute
/// difference (queues must match exactly or the metric is +inf).
PropertyResult check_recursion(std::uint64_t seed, std::size_t instances,
                               const AdvanceFn& advance_fn = {});

/// Trace-form vs expanded-weight fire_prob; metric is max absolute
/// difference of probabilities and of energies.
PropertyResult check_expanded_equivalence(std::uint64_t seed, std::size_t instances);

/// sequence_gradient vs central differences (h = 1e-5); metric is
/// max over coordinates of |a - f| / max(1e-5 * |a|, 1e-8), passing at <= 1.
PropertyResult check_fd_gradient(std::uint64_t seed, std::size_t instances);

/// Enumerated Boltzmann machine distributions sum to one.
PropertyResult check_bm_normalization(std::uint64_t seed, std::size_t instances);

/// Weight gradient equals data x_i x_j minus <X_i X_j>.
PropertyResult check_bm_hebb(std::uint64_t seed, std::size_t instances);

/// Exact-gradient ascent on a 3-unit machine reaches gradient norm < 1e-6.
PropertyResult check_bm_convergence();

/// Serial and OpenMP kernels give bit-identical gradients and traces.
PropertyResult check_backend_agreement(std::uint64_t seed, std::size_t instances);

struct SuiteOptions {
  std::uint64_t seed = 20150101;
  /// Replace advance() in the recursion check (fault injection).
  AdvanceFn advance_override;
};

std::vector<PropertyResult> run_suite(const SuiteOptions& options);

}  // namespace dybm::validation
