#include "dybm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dybm/kernels.hpp"
#include "dybm/learning.hpp"
#include "dybm/oracle.hpp"

namespace dybm::validation {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_rates(Rng& rng, std::size_t max_count, double lo, double hi) {
  std::vector<double> rates(1 + rng.below(max_count));
  for (double& r : rates) r = rng.uniform(lo, hi);
  return rates;
}

void finish(PropertyResult& r) { r.passed = r.max_error <= r.tolerance; }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return kInf;
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::fabs(a[n] - b[n]));
  return m;
}

}  // namespace

ModelConfig random_config(Rng& rng, const RandomConfigSpec& spec) {
  const std::size_t n = 1 + rng.below(spec.max_units);
  std::vector<Synapse> synapses;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.bernoulli(spec.connect_prob)) {
        synapses.push_back({i, j, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_delay)))});
      }
    }
  }
  if (synapses.empty()) {
    synapses.push_back({rng.below(n), rng.below(n), 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_delay)))});
  }
  // Make sure the deepest delay is exercised now and then.
  if (rng.bernoulli(0.5)) synapses.front().delay = spec.max_delay;
  auto lambdas = random_rates(rng, spec.max_lambdas, spec.rate_lo, spec.rate_hi);
  auto mus = random_rates(rng, spec.max_mus, spec.rate_lo, spec.rate_hi);
  const double tau = rng.uniform(0.5, 2.0);
  return ModelConfig::create(n, std::move(lambdas), std::move(mus), std::move(synapses), tau);
}

Parameters random_parameters(Rng& rng, const ModelConfig& config, double bias_scale,
                             double weight_scale) {
  Parameters p = Parameters::zeros(config);
  for (double& b : p.bias) b = rng.uniform(-bias_scale, bias_scale);
  for (double& u : p.u) u = rng.uniform(-weight_scale, weight_scale);
  for (double& v : p.v) v = rng.uniform(-weight_scale, weight_scale);
  return p;
}

Series random_series(Rng& rng, std::size_t n_units, std::size_t length, double p_one) {
  Series s(length, TimeSlice(n_units, 0));
  for (auto& slice : s) {
    for (auto& x : slice) x = rng.bernoulli(p_one) ? 1 : 0;
  }
  return s;
}

PropertyResult check_recursion(std::uint64_t seed, std::size_t instances,
                               const AdvanceFn& advance_fn) {
  PropertyResult r{"recursion_matches_definition", false, 0.0, 1e-9, instances, {}};
  Rng rng(seed);
  const RandomConfigSpec spec{4, 8, 3, 3, 0.05, 0.95, 0.7};
  for (std::size_t n = 0; n < instances; ++n) {
    const ModelConfig config = random_config(rng, spec);
    const Series history = random_series(rng, config.n_units(), rng.below(65), rng.uniform(0.1, 0.9));
    TraceState state = init_state(config);
    for (const auto& slice : history) {
      if (advance_fn) {
        advance_fn(state, config, slice);
      } else {
        advance(state, config, slice);
      }
    }
    const TraceState expected = oracle::traces_from_scratch(config, history);
    double err = std::max(max_abs_diff(state.alpha, expected.alpha), max_abs_diff(state.gamma, expected.gamma));
    if (state.queues != expected.queues || state.step_count != expected.step_count) err = kInf;
    r.max_error = std::max(r.max_error, err);
  }
  finish(r);
  return r;
}

PropertyResult check_expanded_equivalence(std::uint64_t seed, std::size_t instances) {
  PropertyResult r{"trace_energy_matches_expanded_weights", false, 0.0, 1e-10, instances, {}};
  Rng rng(seed);
  const RandomConfigSpec spec{3, 5, 2, 2, 0.1, 0.5, 0.7};
  double max_energy_err = 0.0;
  std::size_t max_horizon = 0;
  for (std::size_t n = 0; n < instances; ++n) {
    const ModelConfig config = random_config(rng, spec);
    const Parameters params = random_parameters(rng, config, 1.0, 1.0);
    const Series history = random_series(rng, config.n_units(), rng.below(81), rng.uniform(0.2, 0.8));
    double scale = 0.0;
    for (double x : params.u) scale = std::max(scale, std::fabs(x));
    for (double x : params.v) scale = std::max(scale, std::fabs(x));
    const std::size_t horizon = oracle::truncation_horizon(config, scale, 1e-12);
    max_horizon = std::max(max_horizon, horizon);
    const auto weights = oracle::expand_weights(params, config, horizon);
    const auto window = oracle::truncated_history(history, horizon, config.n_units());

    TraceState state = init_state(config);
    for (const auto& slice : history) advance(state, config, slice);
    for (std::size_t j = 0; j < config.n_units(); ++j) {
      const double fast_e = unit_energy(params, state, config, j, 1);
      const double slow_e = oracle::naive_unit_energy(weights, params.bias, config, window, j);
      const double fast_p = fire_prob(params, state, config, j);
      const double slow_p = oracle::naive_fire_prob(weights, params.bias, config, window, j);
      max_energy_err = std::max(max_energy_err, std::fabs(fast_e - slow_e));
      r.max_error = std::max(r.max_error, std::fabs(fast_p - slow_p));
    }
  }
  r.max_error = std::max(r.max_error, max_energy_err);
  std::ostringstream d;
  d << "max energy error " << max_energy_err << ", horizons up to " << max_horizon;
  r.detail = d.str();
  finish(r);
  return r;
}

PropertyResult check_fd_gradient(std::uint64_t seed, std::size_t instances) {
  PropertyResult r{"analytic_gradient_matches_finite_differences", false, 0.0, 1.0, instances, {}};
  Rng rng(seed);
  RandomConfigSpec spec{3, 5, 2, 2, 0.1, 0.9, 0.7};
  double max_abs = 0.0;
  for (std::size_t n = 0; n < instances; ++n) {
    ModelConfig config = random_config(rng, spec);
    // Keep (1/mu)^(D-1) moderate so the third derivative along v stays small
    // relative to h^2.
    std::vector<double> mus(config.mus().begin(), config.mus().end());
    for (double& m : mus) m = 0.4 + 0.5 * (m - spec.rate_lo) / (spec.rate_hi - spec.rate_lo);
    config = ModelConfig::create(config.n_units(), {config.lambdas().begin(), config.lambdas().end()},
                                 std::move(mus), {config.synapses().begin(), config.synapses().end()},
                                 config.temperature());
    const Parameters params = random_parameters(rng, config, 1.0, 0.3);
    const Series series = random_series(rng, config.n_units(), 1 + rng.below(20));
    const Gradient analytic = sequence_gradient(params, config, series);
    const Gradient numeric = oracle::fd_gradient(params, config, series, 1e-5);
    auto compare = [&](const std::vector<double>& a, const std::vector<double>& f) {
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = std::fabs(a[k] - f[k]);
        max_abs = std::max(max_abs, diff);
        r.max_error = std::max(r.max_error, diff / std::max(1e-5 * std::fabs(a[k]), 1e-8));
      }
    };
    compare(analytic.d_bias, numeric.d_bias);
    compare(analytic.d_u, numeric.d_u);
    compare(analytic.d_v, numeric.d_v);
  }
  std::ostringstream d;
  d << "max |analytic - fd| " << max_abs << " (metric: diff / max(1e-5|a|, 1e-8))";
  r.detail = d.str();
  finish(r);
  return r;
}

PropertyResult check_bm_normalization(std::uint64_t seed, std::size_t instances) {
  PropertyResult r{"boltzmann_enumeration_normalized", false, 0.0, 1e-12, instances, {}};
  Rng rng(seed);
  for (std::size_t n = 0; n < instances; ++n) {
    const std::size_t units = 1 + rng.below(oracle::kMaxTinyUnits);
    auto bm = oracle::TinyBM::zeros(units, rng.uniform(0.5, 2.0));
    for (double& b : bm.bias) b = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < units; ++i) {
      for (std::size_t j = i + 1; j < units; ++j) bm.set_weight(i, j, rng.uniform(-1.0, 1.0));
    }
    const auto dist = oracle::bm_distribution(bm);
    double total = 0.0;
    for (double p : dist) total += p;
    r.max_error = std::max(r.max_error, std::fabs(total - 1.0));
  }
  finish(r);
  return r;
}

PropertyResult check_bm_hebb(std::uint64_t seed, std::size_t instances) {
  PropertyResult r{"boltzmann_weight_gradient_is_hebbian", false, 0.0, 1e-12, instances, {}};
  Rng rng(seed);
  for (std::size_t n = 0; n < instances; ++n) {
    const std::size_t units = 2 + rng.below(5);
    auto bm = oracle::TinyBM::zeros(units, 1.0);
    for (double& b : bm.bias) b = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < units; ++i) {
      for (std::size_t j = i + 1; j < units; ++j) bm.set_weight(i, j, rng.uniform(-1.0, 1.0));
    }
    std::vector<std::vector<std::uint8_t>> data(1 + rng.below(5));
    for (auto& x : data) x = random_series(rng, units, 1).front();
    const auto g = oracle::bm_exact_gradient(bm, data);
    const auto pair = oracle::bm_pair_expectation(bm);
    for (std::size_t i = 0; i < units; ++i) {
      for (std::size_t j = 0; j < units; ++j) {
        if (i == j) continue;
        double hebb = 0.0;
        for (const auto& x : data) hebb += x[i] * x[j] - pair[i * units + j];
        r.max_error = std::max(r.max_error, std::fabs(g.d_weights[i * units + j] - hebb));
      }
    }
  }
  finish(r);
  return r;
}

PropertyResult check_bm_convergence() {
  PropertyResult r{"boltzmann_ascent_converges", false, 0.0, 1e-6, 1, {}};
  // Every state present with a distinct frequency: the maximum-likelihood
  // parameters are finite.
  std::vector<std::vector<std::uint8_t>> data;
  for (std::size_t s = 0; s < 8; ++s) {
    for (std::size_t c = 0; c <= s; ++c) data.push_back(oracle::bm_state(3, s));
  }
  auto bm = oracle::TinyBM::zeros(3, 1.0);
  const double eta = 1.0 / static_cast<double>(data.size());
  std::size_t iters = 0;
  double norm = kInf;
  for (; iters < 200000; ++iters) {
    const auto g = oracle::bm_exact_gradient(bm, data);
    norm = g.norm();
    if (norm < 1e-6 * 0.5) break;
    for (std::size_t i = 0; i < 3; ++i) bm.bias[i] += eta * g.d_bias[i];
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i + 1; j < 3; ++j) bm.set_weight(i, j, bm.w(i, j) + eta * g.d_weights[i * 3 + j]);
    }
  }
  r.max_error = norm;
  r.detail = "iterations " + std::to_string(iters);
  finish(r);
  return r;
}

PropertyResult check_backend_agreement(std::uint64_t seed, std::size_t instances) {
  PropertyResult r{"serial_and_openmp_kernels_identical", false, 0.0, 0.0, instances, {}};
  Rng rng(seed);
  for (std::size_t n = 0; n < instances; ++n) {
    const RandomConfigSpec spec{48, 6, 3, 3, 0.1, 0.9, 0.5};
    const ModelConfig config = random_config(rng, spec);
    const Parameters params = random_parameters(rng, config, 1.0, 0.2);
    const Series series = random_series(rng, config.n_units(), 1 + rng.below(30));
    const auto serial = evaluate_sequence(params, config, series, Backend::kSerial);
    const auto parallel = evaluate_sequence(params, config, series, Backend::kOpenMP);
    if (!(serial.gradient == parallel.gradient) || serial.log_likelihood != parallel.log_likelihood) {
      r.max_error = kInf;
    }
    TraceState a = init_state(config);
    TraceState b = init_state(config);
    for (const auto& slice : series) {
      kernels::advance(a, config, slice, Backend::kSerial);
      kernels::advance(b, config, slice, Backend::kOpenMP);
    }
    if (!(a == b)) r.max_error = kInf;
  }
  finish(r);
  return r;
}

std::vector<PropertyResult> run_suite(const SuiteOptions& options) {
  const std::uint64_t s = options.seed;
  return {
      check_recursion(s + 1, 200, options.advance_override),
      check_expanded_equivalence(s + 2, 100),
      check_fd_gradient(s + 3, 50),
      check_bm_normalization(s + 4, 20),
      check_bm_hebb(s + 5, 50),
      check_bm_convergence(),
      check_backend_agreement(s + 7, 4),
  };
}

}  // namespace dybm::validation
