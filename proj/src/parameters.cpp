#include "dybm/parameters.hpp"

#include <cmath>
#include <stdexcept>

namespace dybm {

namespace {

bool finite_all(const std::vector<double>& xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void add_into(std::vector<double>& acc, const std::vector<double>& x) {
  if (acc.size() != x.size()) throw std::invalid_argument("gradient shape mismatch");
  for (std::size_t n = 0; n < acc.size(); ++n) acc[n] += x[n];
}

}  // namespace

Parameters Parameters::zeros(const ModelConfig& config) {
  return Parameters{std::vector<double>(config.n_units(), 0.0),
                    std::vector<double>(config.num_pairs() * config.num_lambdas(), 0.0),
                    std::vector<double>(config.num_pairs() * config.num_mus(), 0.0)};
}

bool Parameters::matches(const ModelConfig& config) const {
  return bias.size() == config.n_units() &&
         u.size() == config.num_pairs() * config.num_lambdas() &&
         v.size() == config.num_pairs() * config.num_mus();
}

bool Parameters::all_finite() const { return finite_all(bias) && finite_all(u) && finite_all(v); }

double Parameters::max_abs() const {
  double m = 0.0;
  for (const auto* xs : {&bias, &u, &v}) {
    for (double x : *xs) m = std::fmax(m, std::fabs(x));
  }
  return m;
}

Gradient Gradient::zeros(const ModelConfig& config) {
  return Gradient{std::vector<double>(config.n_units(), 0.0),
                  std::vector<double>(config.num_pairs() * config.num_lambdas(), 0.0),
                  std::vector<double>(config.num_pairs() * config.num_mus(), 0.0)};
}

Gradient& Gradient::operator+=(const Gradient& other) {
  add_into(d_bias, other.d_bias);
  add_into(d_u, other.d_u);
  add_into(d_v, other.d_v);
  return *this;
}

double Gradient::norm() const {
  double sq = 0.0;
  for (const auto* xs : {&d_bias, &d_u, &d_v}) {
    for (double x : *xs) sq += x * x;
  }
  return std::sqrt(sq);
}

bool Gradient::matches(const ModelConfig& config) const {
  return d_bias.size() == config.n_units() &&
         d_u.size() == config.num_pairs() * config.num_lambdas() &&
         d_v.size() == config.num_pairs() * config.num_mus();
}

}  // namespace dybm
