#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dybm {

/// One binary time step: entry j is the value of unit j (0 or 1).
using TimeSlice = std::vector<std::uint8_t>;
/// Time-ordered slices, oldest first.
using Series = std::vector<TimeSlice>;

/// Directed connection from a pre-synaptic unit to a post-synaptic unit
/// with its conduction delay (>= 1 step).
struct Synapse {
  std::size_t pre = 0;
  std::size_t post = 0;
  int delay = 1;

  friend bool operator==(const Synapse&, const Synapse&) = default;
};

/// Immutable, validated network shape and hyper-parameters.
///
/// Synapses are stored sorted by (post, pre). That order is the canonical
/// pair index used by every per-pair tensor (parameters, traces, gradients),
/// and it fixes the accumulation order of per-unit sums.
class ModelConfig {
 public:
  /// Validates and builds a configuration. Throws ConfigError naming the
  /// offending field.
  static ModelConfig create(std::size_t n_units, std::vector<double> lambdas,
                            std::vector<double> mus, std::vector<Synapse> synapses,
                            double temperature = 1.0);

  /// Every ordered pair connected, self-pairs included, with one shared delay.
  static ModelConfig dense(std::size_t n_units, int delay = 2,
                           std::vector<double> lambdas = {0.5},
                           std::vector<double> mus = {0.25}, double temperature = 1.0);

  std::size_t n_units() const noexcept { return n_units_; }
  std::size_t num_pairs() const noexcept { return synapses_.size(); }
  std::size_t num_lambdas() const noexcept { return lambdas_.size(); }
  std::size_t num_mus() const noexcept { return mus_.size(); }
  std::span<const double> lambdas() const noexcept { return lambdas_; }
  std::span<const double> mus() const noexcept { return mus_; }
  double lambda(std::size_t k) const { return lambdas_[k]; }
  double mu(std::size_t l) const { return mus_[l]; }
  double temperature() const noexcept { return temperature_; }
  int max_delay() const noexcept { return max_delay_; }

  std::span<const Synapse> synapses() const noexcept { return synapses_; }
  const Synapse& synapse(std::size_t p) const { return synapses_[p]; }

  /// Pair indices whose post-synaptic unit is `j`, ascending in pre.
  std::span<const std::size_t> incoming(std::size_t j) const;
  /// Pair indices whose pre-synaptic unit is `i`, ascending in post.
  std::span<const std::size_t> outgoing(std::size_t i) const;
  std::optional<std::size_t> pair_index(std::size_t pre, std::size_t post) const;

  /// mu_l^(-delta) for 1 <= delta <= max_delay - 1.
  double inverse_mu_power(std::size_t l, int delta) const {
    return inv_mu_pow_[l * static_cast<std::size_t>(max_delay_) +
                       static_cast<std::size_t>(delta)];
  }

  friend bool operator==(const ModelConfig& a, const ModelConfig& b) {
    return a.n_units_ == b.n_units_ && a.lambdas_ == b.lambdas_ && a.mus_ == b.mus_ &&
           a.synapses_ == b.synapses_ && a.temperature_ == b.temperature_;
  }

 private:
  ModelConfig() = default;

  std::size_t n_units_ = 0;
  std::vector<double> lambdas_;
  std::vector<double> mus_;
  std::vector<Synapse> synapses_;
  double temperature_ = 1.0;
  int max_delay_ = 1;

  std::vector<std::size_t> incoming_index_;  // pair ids grouped by post
  std::vector<std::size_t> incoming_offset_;
  std::vector<std::size_t> outgoing_index_;  // pair ids grouped by pre
  std::vector<std::size_t> outgoing_offset_;
  std::vector<double> inv_mu_pow_;
};

/// Throws std::invalid_argument unless the slice has n entries, all 0 or 1.
void check_slice(const TimeSlice& slice, std::size_t n_units);

}  // namespace dybm
