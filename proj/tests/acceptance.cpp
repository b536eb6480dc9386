// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "dybm/generator.hpp"
#include "dybm/io.hpp"
#include "dybm/learning.hpp"
#include "dybm/validation.hpp"

namespace fs = std::filesystem;
using namespace dybm;

namespace {

const std::string kFixtures = DYBM_FIXTURE_DIR;
constexpr std::uint64_t kSeed = 20150101;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Outcome from_property(const validation::PropertyResult& r) {
  std::ostringstream s;
  s << r.instances << " instances, max_error " << r.max_error << " (tol " << r.tolerance << ")";
  if (!r.detail.empty()) s << "; " << r.detail;
  return {r.passed, s.str()};
}

Outcome from_properties(const std::vector<validation::PropertyResult>& rs) {
  Outcome o{true, ""};
  for (const auto& r : rs) {
    o.passed = o.passed && r.passed;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += r.name + (r.passed ? " ok" : " FAILED") + fmt(" (%.3g <= %.3g)", r.max_error, r.tolerance);
  }
  return o;
}

Outcome fd_gradient() { return from_property(validation::check_fd_gradient(kSeed, 50)); }

Outcome recursion() { return from_property(validation::check_recursion(kSeed, 200)); }

Outcome expanded_weights() { return from_property(validation::check_expanded_equivalence(kSeed, 100)); }

Outcome monotone_ascent() {
  Outcome o{true, ""};
  for (const char* name : {"period4.csv", "random3.csv"}) {
    const auto series = read_series_file(kFixtures + "/" + name);
    const auto config = ModelConfig::dense(series.front().size());
    TrainerConfig t;
    t.learning_rate = 1e-3;
    t.epochs = 200;
    const auto r = train(Parameters::zeros(config), config, {series}, t);
    double worst = 0.0;
    for (std::size_t e = 1; e < r.metrics.epochs.size(); ++e) {
      worst = std::max(worst, r.metrics.epochs[e - 1].log_likelihood - r.metrics.epochs[e].log_likelihood);
    }
    const bool ok = worst <= 1e-9 && r.metrics.epochs.size() == 201;
    o.passed = o.passed && ok;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += std::string(name) + fmt(" LL %.6g -> %.6g", r.metrics.epochs.front().log_likelihood,
                                        r.metrics.epochs.back().log_likelihood) +
                fmt(", max decrease %.3g (tol %.0e)", worst, 1e-9);
  }
  return o;
}

Outcome period4_learning() {
  const auto series = read_series_file(kFixtures + "/period4.csv");
  const auto primer = read_series_file(kFixtures + "/period4_primer.csv");
  const auto config = ModelConfig::dense(2, 2, {0.5}, {0.25}, 1.0);
  TrainerConfig t;
  t.learning_rate = 0.1;
  t.epochs = 500;
  const auto params = train(Parameters::zeros(config), config, {series}, t).params;

  // Probability of the observed bit, every unit, every step.
  auto worst_on = [&](const Series& history, const Series& targets) {
    auto s = init_state(config);
    for (const auto& x : history) advance(s, config, x);
    double worst = 1.0;
    for (const auto& x : targets) {
      for (std::size_t j = 0; j < config.n_units(); ++j) {
        const double p = fire_prob(params, s, config, j);
        worst = std::min(worst, x[j] ? p : 1.0 - p);
      }
      advance(s, config, x);
    }
    return worst;
  };
  const double train_worst = worst_on({}, series);
  const double cycle_worst = worst_on(primer, primer);

  RolloutConfig cfg;
  cfg.horizon = 32;
  cfg.mode = RolloutMode::kArgmax;
  cfg.primer = primer;
  const auto generated = rollout(params, config, cfg);
  std::size_t mismatches = 0;
  for (std::size_t t2 = 0; t2 < generated.size(); ++t2) mismatches += generated[t2] != primer[t2 % 4];

  Outcome o;
  o.passed = train_worst >= 0.9 && cycle_worst >= 0.9 && mismatches == 0 && generated.size() == 32;
  o.detail = fmt("min observed-bit prob: training %.4f, cycle after primer %.4f (>= 0.9)", train_worst,
                 cycle_worst) +
             "; rollout mismatches " + std::to_string(mismatches) + "/32";
  return o;
}

Outcome tiny_bm() {
  return from_properties({validation::check_bm_normalization(kSeed, 20), validation::check_bm_hebb(kSeed, 50),
                          validation::check_bm_convergence()});
}

Outcome footprint() {
  Rng rng(kSeed);
  std::size_t bad = 0;
  const std::size_t instances = 200;
  for (std::size_t n = 0; n < instances; ++n) {
    const auto c = validation::random_config(rng, {8, 10, 4, 4, 0.1, 0.9, 0.5});
    auto s = init_state(c);
    for (const auto& x : validation::random_series(rng, c.n_units(), 20)) advance(s, c, x);
    std::size_t bits = 0;
    for (const auto& syn : c.synapses()) bits += static_cast<std::size_t>(syn.delay - 1);
    const std::size_t m = c.num_pairs(), k = c.num_lambdas(), l = c.num_mus();
    bad += s.real_count() != m * k + c.n_units() * l;
    bad += s.queue_bits() != bits;
    bad += Parameters::zeros(c).size() != m * (k + l) + c.n_units();
  }
  return {bad == 0, std::to_string(instances) + " configurations, " + std::to_string(bad) + " count mismatches"};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "dybm_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [](std::vector<std::string> args, std::string& out) {
    args.insert(args.begin(), "dybm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
    out = o.str();
    return code;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  // Metrics carry wall-clock time, so compare checkpoints and generated CSV.
  std::string out;
  std::vector<std::string> checkpoints, samples;
  int failures = 0;
  for (int rep = 0; rep < 2; ++rep) {
    const auto model = (dir / ("m" + std::to_string(rep) + ".json")).string();
    failures += run({"train", "--config", kFixtures + "/period4_run.json", "--data", kFixtures + "/period4.csv",
                     "--data", kFixtures + "/period4_primer.csv", "--out", model, "--mode", "online", "--seed",
                     "5", "--epochs", "50"},
                    out) != 0;
    checkpoints.push_back(slurp(model));
    failures += run({"generate", "--model", model, "--mode", "sample", "--seed", "42", "--horizon", "64",
                     "--primer", kFixtures + "/period4_primer.csv"},
                    out) != 0;
    samples.push_back(out);
  }
  fs::remove_all(dir);
  const bool same = checkpoints[0] == checkpoints[1] && samples[0] == samples[1];
  return {failures == 0 && same && !checkpoints[0].empty(),
          std::to_string(checkpoints[0].size()) + "-byte checkpoint and " + std::to_string(samples[0].size()) +
              "-byte sample " + (same ? "identical" : "DIFFER") + " across runs" +
              (failures ? ", " + std::to_string(failures) + " CLI failures" : "")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 gradient vs finite differences", fd_gradient},
      {"2 trace recursion vs definition", recursion},
      {"3 trace form vs expanded weights", expanded_weights},
      {"4 monotone full-batch ascent", monotone_ascent},
      {"5 period-4 learning and rollout", period4_learning},
      {"6 tiny Boltzmann machine", tiny_bm},
      {"7 storage footprint", footprint},
      {"8 deterministic train/generate", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %-34s %s [%.2fs]\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    failed += !o.passed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
