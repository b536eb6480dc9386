#include <gtest/gtest.h>

#include <cmath>

#include "dybm/generator.hpp"
#include "dybm/rng.hpp"
#include "dybm/validation.hpp"

namespace dybm {
namespace {

TEST(SampleStep, ZeroParametersAreFairCoins) {
  const auto c = ModelConfig::dense(1);
  const auto p = Parameters::zeros(c);
  const auto s = init_state(c);
  Rng rng(41);
  double ones = 0.0;
  const int draws = 10000;
  for (int n = 0; n < draws; ++n) ones += sample_step(p, s, c, rng)[0];
  EXPECT_NEAR(ones / draws, 0.5, 0.02);
}

TEST(SampleStep, SaturatedBiasAlwaysFires) {
  const auto c = ModelConfig::dense(3);
  auto p = Parameters::zeros(c);
  p.bias = {100.0, 100.0, 100.0};
  RolloutConfig cfg;
  cfg.horizon = 20;
  cfg.mode = RolloutMode::kSample;
  cfg.seed = 5;
  for (const auto& x : rollout(p, c, cfg)) EXPECT_EQ(x, (TimeSlice{1, 1, 1}));
}

TEST(Rollout, SameSeedSameOutput) {
  Rng rng(42);
  const auto c = validation::random_config(rng, {4, 4, 2, 2, 0.2, 0.8, 0.7});
  const auto p = validation::random_parameters(rng, c, 1.0, 1.0);
  RolloutConfig cfg;
  cfg.horizon = 50;
  cfg.mode = RolloutMode::kSample;
  cfg.seed = 77;
  EXPECT_EQ(rollout(p, c, cfg), rollout(p, c, cfg));
  auto other = cfg;
  other.seed = 78;
  EXPECT_NE(rollout(p, c, cfg), rollout(p, c, other));
}

TEST(Rollout, ArgmaxOnZeroParametersIsAllZero) {
  const auto c = ModelConfig::dense(2);
  RolloutConfig cfg;
  cfg.horizon = 6;
  const auto out = rollout(Parameters::zeros(c), c, cfg);
  ASSERT_EQ(out.size(), 6u);
  for (const auto& x : out) EXPECT_EQ(x, (TimeSlice{0, 0}));
}

TEST(Rollout, RejectsZeroHorizonAndBadPrimer) {
  const auto c = ModelConfig::dense(2);
  RolloutConfig cfg;
  cfg.horizon = 0;
  EXPECT_THROW(rollout(Parameters::zeros(c), c, cfg), std::invalid_argument);
  cfg.horizon = 2;
  cfg.primer = {{1}};
  EXPECT_THROW(rollout(Parameters::zeros(c), c, cfg), std::invalid_argument);
}

TEST(Rollout, PrimerAndInitialStateCompose) {
  Rng rng(43);
  const auto c = ModelConfig::dense(2, 3);
  const auto p = validation::random_parameters(rng, c, 1.0, 1.0);
  const Series primer{{1, 0}, {0, 1}, {1, 1}};
  RolloutConfig with_primer;
  with_primer.horizon = 8;
  with_primer.primer = primer;
  auto s = init_state(c);
  for (const auto& x : primer) advance(s, c, x);
  RolloutConfig bare;
  bare.horizon = 8;
  EXPECT_EQ(rollout(p, c, with_primer), rollout(p, c, bare, s));
}

TEST(Rollout, SampledFrequenciesWithinThreeSigma) {
  // Sum of fire probabilities along one trajectory is the expected count of ones.
  Rng rng(44);
  const auto c = ModelConfig::dense(2, 2, {0.6}, {0.4});
  const auto p = validation::random_parameters(rng, c, 0.5, 0.5);
  RolloutConfig cfg;
  cfg.horizon = 4000;
  cfg.mode = RolloutMode::kSample;
  cfg.seed = 3;
  const auto out = rollout(p, c, cfg);
  auto s = init_state(c);
  double observed = 0.0, expected = 0.0, variance = 0.0;
  for (const auto& x : out) {
    const double q = fire_prob(p, s, c, 0);
    expected += q;
    variance += q * (1.0 - q);
    observed += x[0];
    advance(s, c, x);
  }
  EXPECT_LE(std::abs(observed - expected), 3.0 * std::sqrt(variance));
}

TEST(Rollout, ArgmaxInvariantToTemperatureWhenParametersScale) {
  Rng rng(45);
  const auto c1 = ModelConfig::dense(3, 2, {0.5}, {0.3}, 1.0);
  const auto c3 = ModelConfig::dense(3, 2, {0.5}, {0.3}, 3.0);
  auto p1 = validation::random_parameters(rng, c1, 1.0, 1.0);
  auto p3 = p1;
  for (auto& b : p3.bias) b *= 3.0;
  for (auto& u : p3.u) u *= 3.0;
  for (auto& v : p3.v) v *= 3.0;
  RolloutConfig cfg;
  cfg.horizon = 30;
  cfg.primer = {{1, 0, 1}};
  EXPECT_EQ(rollout(p1, c1, cfg), rollout(p3, c3, cfg));
}

TEST(EvalPrediction, ZeroModelOnAnySeries) {
  const auto c = ModelConfig::dense(2);
  const Series s{{1, 0}, {0, 0}, {1, 1}, {0, 1}};
  const auto m = eval_prediction(Parameters::zeros(c), c, s);
  EXPECT_EQ(m.steps, 4u);
  EXPECT_NEAR(m.nll_per_bit, std::log(2.0), 1e-12);
  EXPECT_NEAR(m.log_likelihood, -8 * std::log(2.0), 1e-12);
  // Ties predict 0: 4 of 8 bits are zero.
  EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
}

TEST(EvalPrediction, ConfidentBiasModel) {
  const auto c = ModelConfig::dense(1);
  auto p = Parameters::zeros(c);
  p.bias[0] = std::log(3.0);
  const auto m = eval_prediction(p, c, {{1}, {1}, {0}, {1}});
  EXPECT_DOUBLE_EQ(m.accuracy, 0.75);
  EXPECT_NEAR(m.log_likelihood, 3 * std::log(0.75) + std::log(0.25), 1e-12);
}

}  // namespace
}  // namespace dybm
