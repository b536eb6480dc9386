#include "dybm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dybm/learning.hpp"

namespace dybm::oracle {

double directional_weight(const Parameters& params, const ModelConfig& config, std::size_t pre,
                          std::size_t post, long delta) {
  const auto p = config.pair_index(pre, post);
  if (!p || delta == 0) return 0.0;
  const long d = config.synapse(*p).delay;
  double w = 0.0;
  if (delta >= d) {
    for (std::size_t k = 0; k < config.num_lambdas(); ++k) {
      w += params.u_at(config, *p, k) * std::pow(config.lambda(k), static_cast<double>(delta - d));
    }
  } else {
    for (std::size_t l = 0; l < config.num_mus(); ++l) {
      w -= params.v_at(config, *p, l) * std::pow(config.mu(l), static_cast<double>(-delta));
    }
  }
  return w;
}

ExpandedWeights expand_weights(const Parameters& params, const ModelConfig& config,
                               std::size_t horizon) {
  if (horizon < 2) throw std::invalid_argument("expand_weights: horizon must be >= 2");
  const std::size_t n = config.n_units();
  ExpandedWeights out(n, horizon);
  for (std::size_t delta = 1; delta < horizon; ++delta) {
    const auto sd = static_cast<long>(delta);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        out.at(delta, i, j) = directional_weight(params, config, i, j, sd) +
                              directional_weight(params, config, j, i, -sd);
      }
    }
  }
  return out;
}

Series truncated_history(const Series& history, std::size_t horizon, std::size_t n_units) {
  const std::size_t len = horizon - 1;
  Series window(len, TimeSlice(n_units, 0));
  const std::size_t take = std::min(len, history.size());
  for (std::size_t lag = 1; lag <= take; ++lag) {
    window[len - lag] = history[history.size() - lag];
  }
  return window;
}

std::size_t truncation_horizon(const ModelConfig& config, double param_scale, double tol) {
  const auto lmax = *std::max_element(config.lambdas().begin(), config.lambdas().end());
  const auto mmax = *std::max_element(config.mus().begin(), config.mus().end());
  const double rho = std::max(lmax, mmax);
  const auto d = static_cast<std::size_t>(config.max_delay());
  const double scale = static_cast<double>(config.n_units()) * param_scale *
                       static_cast<double>(config.num_lambdas() + config.num_mus());
  if (scale <= 0.0) return d + 1;
  // Tail over lags >= T of every weight reaching unit j is at most
  // scale * rho^(T-D) / (1 - rho).
  const double needed = std::log(tol * (1.0 - rho) / scale) / std::log(rho);
  const auto extra = static_cast<std::size_t>(std::max(0.0, std::ceil(needed)));
  return std::max<std::size_t>(d + extra, std::max<std::size_t>(d + 1, 2));
}

double naive_unit_energy(const ExpandedWeights& w, const std::vector<double>& bias,
                         const ModelConfig& config, const Series& window, std::size_t j) {
  const std::size_t horizon = w.horizon();
  if (window.size() != horizon - 1) {
    throw std::invalid_argument("naive_unit_energy: window must hold T-1 = " +
                                std::to_string(horizon - 1) + " slices");
  }
  double energy = -bias[j];
  for (std::size_t delta = 1; delta < horizon; ++delta) {
    const TimeSlice& x = window[horizon - 1 - delta];
    for (std::size_t i = 0; i < config.n_units(); ++i) {
      if (x[i]) energy -= w.at(delta, i, j);
    }
  }
  return energy;
}

double naive_fire_prob(const ExpandedWeights& w, const std::vector<double>& bias,
                       const ModelConfig& config, const Series& window, std::size_t j) {
  const double e = naive_unit_energy(w, bias, config, window, j) / config.temperature();
  return std::exp(-e) / (1.0 + std::exp(-e));
}

TraceState traces_from_scratch(const ModelConfig& config, const Series& history) {
  const std::size_t len = history.size();
  auto x = [&](std::size_t unit, std::size_t lag) -> double {
    return lag >= 1 && lag <= len ? history[len - lag][unit] : 0.0;
  };
  TraceState s;
  const std::size_t nk = config.num_lambdas();
  const std::size_t nl = config.num_mus();
  s.alpha.assign(config.num_pairs() * nk, 0.0);
  s.gamma.assign(config.n_units() * nl, 0.0);
  for (std::size_t p = 0; p < config.num_pairs(); ++p) {
    const auto& syn = config.synapse(p);
    const auto d = static_cast<std::size_t>(syn.delay);
    for (std::size_t k = 0; k < nk; ++k) {
      double a = 0.0;
      for (std::size_t lag = d; lag <= len; ++lag) {
        a += std::pow(config.lambda(k), static_cast<double>(lag - d)) * x(syn.pre, lag);
      }
      s.alpha[p * nk + k] = a;
    }
    std::vector<std::uint8_t> bits(d - 1);
    for (std::size_t lag = 1; lag < d; ++lag) bits[lag - 1] = static_cast<std::uint8_t>(x(syn.pre, lag));
    DelayLine q(d - 1);
    q.assign(bits);
    s.queues.push_back(std::move(q));
  }
  for (std::size_t i = 0; i < config.n_units(); ++i) {
    for (std::size_t l = 0; l < nl; ++l) {
      double g = 0.0;
      for (std::size_t lag = 1; lag <= len; ++lag) {
        g += std::pow(config.mu(l), static_cast<double>(lag)) * x(i, lag);
      }
      s.gamma[i * nl + l] = g;
    }
  }
  s.step_count = len;
  return s;
}

Gradient fd_gradient(const Parameters& params, const ModelConfig& config, const Series& series,
                     double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
  Parameters probe = params;
  auto central = [&](double& coord) {
    const double saved = coord;
    coord = saved + h;
    const double up = sequence_log_likelihood(probe, config, series);
    coord = saved - h;
    const double down = sequence_log_likelihood(probe, config, series);
    coord = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw std::domain_error("fd_gradient: non-finite likelihood");
    }
    return (up - down) / (2.0 * h);
  };
  Gradient g = Gradient::zeros(config);
  for (std::size_t n = 0; n < probe.bias.size(); ++n) g.d_bias[n] = central(probe.bias[n]);
  for (std::size_t n = 0; n < probe.u.size(); ++n) g.d_u[n] = central(probe.u[n]);
  for (std::size_t n = 0; n < probe.v.size(); ++n) g.d_v[n] = central(probe.v[n]);
  return g;
}

// ---------------------------------------------------------------------------

TinyBM TinyBM::zeros(std::size_t n, double temperature) {
  TinyBM bm;
  bm.n = n;
  bm.bias.assign(n, 0.0);
  bm.weights.assign(n * n, 0.0);
  bm.temperature = temperature;
  return bm;
}

void TinyBM::set_weight(std::size_t i, std::size_t j, double value) {
  if (i == j) throw std::invalid_argument("TinyBM: self-weights must stay zero");
  weights[i * n + j] = value;
  weights[j * n + i] = value;
}

void TinyBM::validate() const {
  if (n == 0 || n > kMaxTinyUnits) {
    throw std::invalid_argument("TinyBM: n must be in [1, " + std::to_string(kMaxTinyUnits) + "]");
  }
  if (bias.size() != n || weights.size() != n * n) throw std::invalid_argument("TinyBM: bad shape");
  if (!(temperature > 0.0)) throw std::invalid_argument("TinyBM: temperature must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    if (w(i, i) != 0.0) throw std::invalid_argument("TinyBM: diagonal must be zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (w(i, j) != w(j, i)) throw std::invalid_argument("TinyBM: weights must be symmetric");
    }
  }
}

double bm_energy(const TinyBM& bm, const std::vector<std::uint8_t>& x) {
  double e = 0.0;
  for (std::size_t i = 0; i < bm.n; ++i) {
    e -= bm.bias[i] * x[i];
    for (std::size_t j = 0; j < bm.n; ++j) e -= 0.5 * x[i] * bm.w(i, j) * x[j];
  }
  return e;
}

std::vector<std::uint8_t> bm_state(std::size_t n, std::size_t index) {
  std::vector<std::uint8_t> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((index >> i) & 1u);
  return x;
}

std::vector<double> bm_distribution(const TinyBM& bm) {
  bm.validate();
  const std::size_t states = std::size_t{1} << bm.n;
  std::vector<double> neg(states);
  for (std::size_t s = 0; s < states; ++s) neg[s] = -bm_energy(bm, bm_state(bm.n, s)) / bm.temperature;
  const double top = *std::max_element(neg.begin(), neg.end());
  double z = 0.0;
  for (double& v : neg) {
    v = std::exp(v - top);
    z += v;
  }
  for (double& v : neg) v /= z;
  return neg;
}

double bm_prob(const TinyBM& bm, const std::vector<std::uint8_t>& x) {
  if (x.size() != bm.n) throw std::invalid_argument("bm_prob: state length mismatch");
  std::size_t index = 0;
  for (std::size_t i = 0; i < bm.n; ++i) {
    if (x[i] > 1) throw std::invalid_argument("bm_prob: state must be binary");
    index |= static_cast<std::size_t>(x[i]) << i;
  }
  return bm_distribution(bm)[index];
}

double BMGradient::norm() const {
  double sq = 0.0;
  for (double g : d_bias) sq += g * g;
  const std::size_t n = d_bias.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sq += d_weights[i * n + j] * d_weights[i * n + j];
  }
  return std::sqrt(sq);
}

BMGradient bm_exact_gradient(const TinyBM& bm, const std::vector<std::vector<std::uint8_t>>& data) {
  const auto dist = bm_distribution(bm);
  const std::size_t n = bm.n;
  // dE/db_i = -x_i, dE/dw_ij = -x_i x_j (i < j; each pair counted once in E).
  auto energy_grad = [n](const std::vector<std::uint8_t>& x, std::vector<double>& gb,
                         std::vector<double>& gw, double weight) {
    for (std::size_t i = 0; i < n; ++i) {
      gb[i] -= weight * x[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) gw[i * n + j] -= weight * x[i] * x[j];
      }
    }
  };
  std::vector<double> data_b(n, 0.0), data_w(n * n, 0.0);
  for (const auto& x : data) {
    if (x.size() != n) throw std::invalid_argument("bm_exact_gradient: state length mismatch");
    energy_grad(x, data_b, data_w, 1.0);
  }
  std::vector<double> model_b(n, 0.0), model_w(n * n, 0.0);
  for (std::size_t s = 0; s < dist.size(); ++s) energy_grad(bm_state(n, s), model_b, model_w, dist[s]);

  const double count = static_cast<double>(data.size());
  BMGradient g{std::vector<double>(n), std::vector<double>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) g.d_bias[i] = -(data_b[i] - count * model_b[i]) / bm.temperature;
  for (std::size_t k = 0; k < n * n; ++k) g.d_weights[k] = -(data_w[k] - count * model_w[k]) / bm.temperature;
  return g;
}

std::vector<double> bm_pair_expectation(const TinyBM& bm) {
  const auto dist = bm_distribution(bm);
  const std::size_t n = bm.n;
  std::vector<double> out(n * n, 0.0);
  for (std::size_t s = 0; s < dist.size(); ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!((s >> i) & 1u)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if ((s >> j) & 1u) out[i * n + j] += dist[s];
      }
    }
  }
  return out;
}

}  // namespace dybm::oracle
