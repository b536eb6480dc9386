#pragma once

// Brute-force reference implementations. Nothing here reuses the trace
// recursions or the kernels; every quantity is evaluated from its defining
// sum so it can check the fast path independently.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dybm/config.hpp"
#include "dybm/model.hpp"
#include "dybm/parameters.hpp"

namespace dybm::oracle {

/// Explicit lag-indexed weight matrices W[delta](i, j), delta in [1, T-1].
/// W[0] is identically zero and not stored.
class ExpandedWeights {
 public:
  ExpandedWeights(std::size_t n_units, std::size_t horizon)
      : n_(n_units), horizon_(horizon), w_((horizon - 1) * n_units * n_units, 0.0) {}

  std::size_t n_units() const noexcept { return n_; }
  std::size_t horizon() const noexcept { return horizon_; }

  double& at(std::size_t delta, std::size_t i, std::size_t j) {
    return w_[((delta - 1) * n_ + i) * n_ + j];
  }
  double at(std::size_t delta, std::size_t i, std::size_t j) const {
    return w_[((delta - 1) * n_ + i) * n_ + j];
  }

 private:
  std::size_t n_;
  std::size_t horizon_;
  std::vector<double> w_;
};

/// Directional kernel of the connected pair (pre, post) at lag delta.
/// `delta` may be negative, zero or positive.
double directional_weight(const Parameters& params, const ModelConfig& config, std::size_t pre,
                          std::size_t post, long delta);

/// Expands u, v into W[delta] = What(i,j)[delta] + What(j,i)[-delta].
/// Throws std::invalid_argument when T < 2.
ExpandedWeights expand_weights(const Parameters& params, const ModelConfig& config,
                               std::size_t horizon);

/// Last T-1 slices of `history`, zero-padded at the old end, oldest first.
Series truncated_history(const Series& history, std::size_t horizon, std::size_t n_units);

/// Smallest T such that the weight tail beyond lag T-1 is bounded by `tol`,
/// given |u|, |v| <= param_scale.
std::size_t truncation_horizon(const ModelConfig& config, double param_scale, double tol = 1e-12);

/// E_j(1 | history) as the direct double sum over lags and units.
/// `window` must hold exactly T-1 slices, oldest first.
double naive_unit_energy(const ExpandedWeights& w, const std::vector<double>& bias,
                         const ModelConfig& config, const Series& window, std::size_t j);

double naive_fire_prob(const ExpandedWeights& w, const std::vector<double>& bias,
                       const ModelConfig& config, const Series& window, std::size_t j);

/// Literal evaluation of alpha, gamma and the queue contents after `history`
/// (zero padding before it).
TraceState traces_from_scratch(const ModelConfig& config, const Series& history);

/// Central finite differences of sequence_log_likelihood over every
/// coordinate. Throws std::domain_error if the likelihood is not finite.
Gradient fd_gradient(const Parameters& params, const ModelConfig& config, const Series& series,
                     double h = 1e-5);

// ---------------------------------------------------------------------------
// Fully visible Boltzmann machine, solved by enumerating all 2^n states.

inline constexpr std::size_t kMaxTinyUnits = 12;

struct TinyBM {
  std::size_t n = 0;
  std::vector<double> bias;
  std::vector<double> weights;  // n*n row-major, symmetric, zero diagonal
  double temperature = 1.0;

  static TinyBM zeros(std::size_t n, double temperature = 1.0);
  double w(std::size_t i, std::size_t j) const { return weights[i * n + j]; }
  /// Sets w(i,j) and w(j,i); i != j.
  void set_weight(std::size_t i, std::size_t j, double value);
  /// Throws std::invalid_argument on n > 12, asymmetry or nonzero diagonal.
  void validate() const;
};

/// -b.x - x.W.x / 2
double bm_energy(const TinyBM& bm, const std::vector<std::uint8_t>& x);
/// State x <-> bit pattern: x_i = bit i of the index.
std::vector<std::uint8_t> bm_state(std::size_t n, std::size_t index);
/// Probabilities of all 2^n states indexed by bm_state.
std::vector<double> bm_distribution(const TinyBM& bm);
double bm_prob(const TinyBM& bm, const std::vector<std::uint8_t>& x);

struct BMGradient {
  std::vector<double> d_bias;
  std::vector<double> d_weights;  // n*n, symmetric, zero diagonal; entry (i,j) is d/dw_ij
  double norm() const;
};

/// Sum over the dataset of grad log P(x): -(1/tau)(grad E(x) - E_P[grad E]).
BMGradient bm_exact_gradient(const TinyBM& bm, const std::vector<std::vector<std::uint8_t>>& data);

/// Model expectation <X_i X_j> under the enumerated distribution.
std::vector<double> bm_pair_expectation(const TinyBM& bm);

}  // namespace dybm::oracle
