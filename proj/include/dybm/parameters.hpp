#pragma once

#include <cstddef>
#include <vector>

#include "dybm/config.hpp"

namespace dybm {

/// Learnable coefficients. `u` holds the potentiation weights, laid out
/// pair-major as u[p * |K| + k]; `v` the depression weights as v[p * |L| + l],
/// with p the canonical pair index of the config.
struct Parameters {
  std::vector<double> bias;
  std::vector<double> u;
  std::vector<double> v;

  /// All-zero parameters shaped for `config`.
  static Parameters zeros(const ModelConfig& config);

  double& u_at(const ModelConfig& c, std::size_t p, std::size_t k) { return u[p * c.num_lambdas() + k]; }
  double u_at(const ModelConfig& c, std::size_t p, std::size_t k) const { return u[p * c.num_lambdas() + k]; }
  double& v_at(const ModelConfig& c, std::size_t p, std::size_t l) { return v[p * c.num_mus() + l]; }
  double v_at(const ModelConfig& c, std::size_t p, std::size_t l) const { return v[p * c.num_mus() + l]; }

  std::size_t size() const noexcept { return bias.size() + u.size() + v.size(); }
  bool matches(const ModelConfig& config) const;
  bool all_finite() const;
  double max_abs() const;

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

/// One log-likelihood gradient; same layout as Parameters.
struct Gradient {
  std::vector<double> d_bias;
  std::vector<double> d_u;
  std::vector<double> d_v;

  static Gradient zeros(const ModelConfig& config);

  Gradient& operator+=(const Gradient& other);
  double norm() const;
  std::size_t size() const noexcept { return d_bias.size() + d_u.size() + d_v.size(); }
  bool matches(const ModelConfig& config) const;

  friend bool operator==(const Gradient&, const Gradient&) = default;
};

}  // namespace dybm
