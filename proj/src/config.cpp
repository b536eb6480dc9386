#include "dybm/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dybm/errors.hpp"

namespace dybm {

namespace {

void check_rates(const std::vector<double>& rates, const char* field) {
  if (rates.empty()) throw ConfigError(std::string(field) + ": must not be empty");
  for (std::size_t k = 0; k < rates.size(); ++k) {
    const double r = rates[k];
    if (!(r > 0.0 && r < 1.0)) {
      throw ConfigError(std::string(field) + "[" + std::to_string(k) +
                        "]: must lie strictly inside (0, 1), got " + std::to_string(r));
    }
  }
}

}  // namespace

ModelConfig ModelConfig::create(std::size_t n_units, std::vector<double> lambdas,
                                std::vector<double> mus, std::vector<Synapse> synapses,
                                double temperature) {
  if (n_units == 0) throw ConfigError("n_units: must be positive");
  check_rates(lambdas, "lambdas");
  check_rates(mus, "mus");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("temperature: must be a positive finite number");
  }

  int max_delay = 1;
  for (const auto& s : synapses) {
    if (s.pre >= n_units || s.post >= n_units) {
      throw ConfigError("connectivity: pair (" + std::to_string(s.pre) + "," +
                        std::to_string(s.post) + ") out of range for n_units=" +
                        std::to_string(n_units));
    }
    if (s.delay < 1) {
      throw ConfigError("connectivity: delay of pair (" + std::to_string(s.pre) + "," +
                        std::to_string(s.post) + ") must be >= 1");
    }
    max_delay = std::max(max_delay, s.delay);
  }
  std::sort(synapses.begin(), synapses.end(), [](const Synapse& a, const Synapse& b) {
    return a.post != b.post ? a.post < b.post : a.pre < b.pre;
  });
  for (std::size_t p = 1; p < synapses.size(); ++p) {
    if (synapses[p].pre == synapses[p - 1].pre && synapses[p].post == synapses[p - 1].post) {
      throw ConfigError("connectivity: duplicate pair (" + std::to_string(synapses[p].pre) +
                        "," + std::to_string(synapses[p].post) + ")");
    }
  }

  // beta multiplies queued spikes by (1/mu)^delta up to delta = D - 1.
  const double mu_min = *std::min_element(mus.begin(), mus.end());
  const double log_growth = static_cast<double>(max_delay - 1) * -std::log(mu_min);
  if (log_growth >= std::log(std::numeric_limits<double>::max())) {
    throw ConfigError("mus: (1/mu_min)^(D-1) overflows double precision for D=" +
                      std::to_string(max_delay));
  }

  ModelConfig c;
  c.n_units_ = n_units;
  c.lambdas_ = std::move(lambdas);
  c.mus_ = std::move(mus);
  c.synapses_ = std::move(synapses);
  c.temperature_ = temperature;
  c.max_delay_ = max_delay;

  const std::size_t m = c.synapses_.size();
  c.incoming_offset_.assign(n_units + 1, 0);
  c.outgoing_offset_.assign(n_units + 1, 0);
  for (const auto& s : c.synapses_) {
    ++c.incoming_offset_[s.post + 1];
    ++c.outgoing_offset_[s.pre + 1];
  }
  for (std::size_t i = 0; i < n_units; ++i) {
    c.incoming_offset_[i + 1] += c.incoming_offset_[i];
    c.outgoing_offset_[i + 1] += c.outgoing_offset_[i];
  }
  c.incoming_index_.resize(m);
  c.outgoing_index_.resize(m);
  std::vector<std::size_t> in_fill(c.incoming_offset_.begin(), c.incoming_offset_.end() - 1);
  std::vector<std::size_t> out_fill(c.outgoing_offset_.begin(), c.outgoing_offset_.end() - 1);
  // Pairs are sorted by (post, pre), so both groupings come out ordered.
  for (std::size_t p = 0; p < m; ++p) {
    const auto& s = c.synapses_[p];
    c.incoming_index_[in_fill[s.post]++] = p;
    c.outgoing_index_[out_fill[s.pre]++] = p;
  }

  const auto stride = static_cast<std::size_t>(max_delay);
  c.inv_mu_pow_.assign(c.mus_.size() * stride, 1.0);
  for (std::size_t l = 0; l < c.mus_.size(); ++l) {
    for (int delta = 1; delta < max_delay; ++delta) {
      c.inv_mu_pow_[l * stride + static_cast<std::size_t>(delta)] =
          std::pow(c.mus_[l], -static_cast<double>(delta));
    }
  }
  return c;
}

ModelConfig ModelConfig::dense(std::size_t n_units, int delay, std::vector<double> lambdas,
                               std::vector<double> mus, double temperature) {
  std::vector<Synapse> synapses;
  synapses.reserve(n_units * n_units);
  for (std::size_t j = 0; j < n_units; ++j) {
    for (std::size_t i = 0; i < n_units; ++i) synapses.push_back({i, j, delay});
  }
  return create(n_units, std::move(lambdas), std::move(mus), std::move(synapses), temperature);
}

std::span<const std::size_t> ModelConfig::incoming(std::size_t j) const {
  return std::span<const std::size_t>(incoming_index_)
      .subspan(incoming_offset_[j], incoming_offset_[j + 1] - incoming_offset_[j]);
}

std::span<const std::size_t> ModelConfig::outgoing(std::size_t i) const {
  return std::span<const std::size_t>(outgoing_index_)
      .subspan(outgoing_offset_[i], outgoing_offset_[i + 1] - outgoing_offset_[i]);
}

std::optional<std::size_t> ModelConfig::pair_index(std::size_t pre, std::size_t post) const {
  if (post >= n_units_) return std::nullopt;
  for (std::size_t p : incoming(post)) {
    if (synapses_[p].pre == pre) return p;
  }
  return std::nullopt;
}

void check_slice(const TimeSlice& slice, std::size_t n_units) {
  if (slice.size() != n_units) {
    throw std::invalid_argument("slice has " + std::to_string(slice.size()) +
                                " units, model expects " + std::to_string(n_units));
  }
  for (std::size_t j = 0; j < slice.size(); ++j) {
    if (slice[j] > 1) {
      throw std::invalid_argument("slice entry " + std::to_string(j) + " is not binary");
    }
  }
}

}  // namespace dybm
