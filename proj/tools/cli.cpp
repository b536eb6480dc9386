#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "dybm/errors.hpp"
#include "dybm/io.hpp"
#include "dybm/kernels.hpp"
#include "dybm/oracle.hpp"
#include "dybm/rng.hpp"
#include "dybm/validation.hpp"

namespace dybm::cli {

namespace {

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ParseError(where + ": unknown field '" + key + "'");
    }
  }
}

TrainMode parse_train_mode(const std::string& s) {
  if (s == "online") return TrainMode::kOnline;
  if (s == "full_batch") return TrainMode::kFullBatch;
  throw ConfigError("trainer.mode: expected 'online' or 'full_batch', got '" + s + "'");
}

RolloutMode parse_rollout_mode(const std::string& s) {
  if (s == "sample") return RolloutMode::kSample;
  if (s == "argmax") return RolloutMode::kArgmax;
  throw ConfigError("generation.mode: expected 'sample' or 'argmax', got '" + s + "'");
}

Backend parse_backend(const std::string& s, const ModelConfig& config) {
  if (s == "serial") return Backend::kSerial;
  if (s == "openmp") return Backend::kOpenMP;
  if (s == "auto") return auto_backend(config);
  throw ConfigError("backend: expected serial, openmp or auto");
}

ModelConfig config_for_data(const RunConfig& rc, const std::vector<Series>& dataset) {
  const std::size_t width = dataset.front().front().size();
  ModelConfig config = model_config_from_json(rc.model, true, width);
  for (std::size_t s = 0; s < dataset.size(); ++s) {
    if (dataset[s].front().size() != config.n_units()) {
      throw ConfigError("data file " + std::to_string(s + 1) + " has " +
                        std::to_string(dataset[s].front().size()) + " columns but n_units is " +
                        std::to_string(config.n_units()));
    }
  }
  return config;
}

void require_width(const Series& series, const ModelConfig& config, const std::string& what) {
  if (series.front().size() != config.n_units()) {
    throw ConfigError(what + " has " + std::to_string(series.front().size()) +
                      " columns but the model has " + std::to_string(config.n_units()) + " units");
  }
}

std::string metrics_line(const EpochRecord& r) {
  nlohmann::ordered_json j;
  j["epoch"] = r.epoch;
  j["step"] = r.step;
  j["log_likelihood"] = r.log_likelihood;
  j["grad_norm"] = r.grad_norm;
  j["wall_ms"] = r.wall_ms;
  return dump_json(j, -1);
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string config_path;
  std::vector<std::string> data_paths;
  std::string out_path;
  std::optional<std::size_t> epochs;
  std::optional<double> learning_rate;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::string backend = "auto";
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig rc = a.config_path.empty() ? RunConfig{} : read_run_config_file(a.config_path);
  if (a.epochs) rc.trainer.epochs = *a.epochs;
  if (a.learning_rate) rc.trainer.learning_rate = *a.learning_rate;
  if (a.mode) rc.trainer.mode = parse_train_mode(*a.mode);
  if (a.seed) rc.trainer.shuffle_seed = *a.seed;
  rc.trainer.validate();

  std::vector<Series> dataset;
  for (const auto& path : a.data_paths) dataset.push_back(read_series_file(path));
  const ModelConfig config = config_for_data(rc, dataset);
  rc.trainer.backend = parse_backend(a.backend, config);

  err << "training " << config.n_units() << " units, " << config.num_pairs() << " pairs on "
      << dataset.size() << " series for " << rc.trainer.epochs << " epochs\n";
  auto result = train(Parameters::zeros(config), config, dataset, rc.trainer,
                      [&](const EpochRecord& r) { out << metrics_line(r) << '\n'; });

  // Saved traces continue the last training series.
  TraceState state = init_state(config);
  for (const auto& slice : dataset.back()) advance(state, config, slice);
  write_checkpoint_file(a.out_path, config, result.params, &state);
  err << "wrote " << a.out_path << "\n";
  return kOk;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, std::ostream& out) {
  const Checkpoint ck = read_checkpoint_file(model_path);
  const Series series = read_series_file(data_path);
  require_width(series, ck.config, data_path);
  const auto m = eval_prediction(ck.params, ck.config, series);
  nlohmann::ordered_json j;
  j["log_likelihood"] = m.log_likelihood;
  j["nll_per_bit"] = m.nll_per_bit;
  j["accuracy"] = m.accuracy;
  j["steps"] = m.steps;
  out << dump_json(j, -1) << '\n';
  return kOk;
}

struct GenerateArgs {
  std::string model_path;
  std::string config_path;
  std::optional<std::size_t> horizon;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::string primer_path;
  bool resume = false;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const Checkpoint ck = read_checkpoint_file(a.model_path);
  RunConfig rc = a.config_path.empty() ? RunConfig{} : read_run_config_file(a.config_path);
  RolloutConfig cfg = rc.generation;
  if (a.horizon) cfg.horizon = *a.horizon;
  if (a.mode) cfg.mode = parse_rollout_mode(*a.mode);
  if (a.seed) cfg.seed = *a.seed;
  if (cfg.horizon == 0) throw ConfigError("horizon: must be at least 1");
  if (!a.primer_path.empty()) {
    cfg.primer = read_series_file(a.primer_path);
    require_width(cfg.primer, ck.config, a.primer_path);
  }
  std::optional<TraceState> start;
  if (a.resume) {
    if (!ck.state) throw ConfigError("--resume: checkpoint has no trace_state");
    start = ck.state;
  }
  write_series_csv(out, rollout(ck.params, ck.config, cfg, start));
  return kOk;
}

int cmd_validate(std::uint64_t seed, const std::string& fault, std::ostream& out,
                 std::ostream& err) {
  validation::SuiteOptions opts;
  opts.seed = seed;
  if (fault == "alpha-printed") {
    opts.advance_override = testing::advance_with_printed_alpha_recursion;
  } else if (fault != "none") {
    throw ConfigError("--inject-fault: expected 'none' or 'alpha-printed'");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = validation::run_suite(opts);
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed;
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " max_error=" << format_real(r.max_error)
        << " tolerance=" << format_real(r.tolerance) << " instances=" << r.instances;
    if (!r.detail.empty()) out << " (" << r.detail << ")";
    out << '\n';
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  err << "validation finished in " << secs << " s\n";
  out << (ok ? "all properties passed" : "validation FAILED") << '\n';
  return ok ? kOk : kValidationFailed;
}

int cmd_kernel_dump(const std::string& model_path, std::size_t pre, std::size_t post,
                    std::size_t max_delta, std::ostream& out) {
  const Checkpoint ck = read_checkpoint_file(model_path);
  if (pre >= ck.config.n_units() || post >= ck.config.n_units() || !ck.config.pair_index(pre, post)) {
    throw ConfigError("kernel-dump: pair (" + std::to_string(pre) + "," + std::to_string(post) +
                      ") is not connected");
  }
  out << "delta,w_pre_post,w_post_pre_reversed,w_total\n";
  for (std::size_t delta = 1; delta <= max_delta; ++delta) {
    const auto d = static_cast<long>(delta);
    const double forward = oracle::directional_weight(ck.params, ck.config, pre, post, d);
    const double backward = oracle::directional_weight(ck.params, ck.config, post, pre, -d);
    out << delta << ',' << format_real(forward) << ',' << format_real(backward) << ','
        << format_real(forward + backward) << '\n';
  }
  return kOk;
}

// Random network where every unit has exactly `fan_in` distinct predecessors.
ModelConfig bench_config(std::size_t n, std::size_t fan_in, int max_delay, Rng& rng) {
  std::vector<Synapse> synapses;
  std::vector<std::size_t> pool(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    rng.shuffle(pool);
    for (std::size_t f = 0; f < std::min(fan_in, n); ++f) {
      synapses.push_back({pool[f], j, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_delay)))});
    }
  }
  return ModelConfig::create(n, {0.5, 0.8}, {0.25, 0.5}, std::move(synapses));
}

int cmd_bench(const std::vector<std::size_t>& sizes, std::size_t fan_in, std::size_t steps,
              std::uint64_t seed, std::ostream& out) {
  using clock = std::chrono::steady_clock;
  nlohmann::ordered_json report;
  report["fan_in"] = fan_in;
  report["steps"] = steps;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  double fastest = 0.0, slowest = 0.0;
  bool counts_ok = true;
  for (std::size_t n : sizes) {
    Rng rng(seed + n);
    const ModelConfig config = bench_config(n, fan_in, 4, rng);
    const Series series = validation::random_series(rng, n, steps, 0.2);
    Parameters params = Parameters::zeros(config);
    TraceState state = init_state(config);
    std::vector<double> probs(n);
    Gradient g = Gradient::zeros(config);

    const auto t0 = clock::now();
    for (const auto& slice : series) {
      kernels::fire_probabilities(params, state, config, probs, Backend::kSerial);
      std::fill(g.d_bias.begin(), g.d_bias.end(), 0.0);
      std::fill(g.d_u.begin(), g.d_u.end(), 0.0);
      std::fill(g.d_v.begin(), g.d_v.end(), 0.0);
      kernels::accumulate_step_gradient(state, config, slice, probs, g, Backend::kSerial);
      params = sgd_update(params, g, 1e-3);
      kernels::advance(state, config, slice, Backend::kSerial);
    }
    const double ns = std::chrono::duration<double, std::nano>(clock::now() - t0).count();
    const double per_synapse = ns / (static_cast<double>(steps) * static_cast<double>(config.num_pairs()));
    fastest = fastest == 0.0 ? per_synapse : std::min(fastest, per_synapse);
    slowest = std::max(slowest, per_synapse);

    const std::size_t m = config.num_pairs();
    const std::size_t nk = config.num_lambdas(), nl = config.num_mus();
    std::size_t expected_bits = 0;
    for (const auto& s : config.synapses()) expected_bits += static_cast<std::size_t>(s.delay - 1);
    const bool ok = state.real_count() == m * nk + n * nl && params.size() == m * (nk + nl) + n &&
                    state.queue_bits() == expected_bits;
    counts_ok = counts_ok && ok;

    nlohmann::ordered_json row;
    row["n_units"] = n;
    row["pairs"] = m;
    row["max_delay"] = config.max_delay();
    row["ns_per_synapse_step"] = per_synapse;
    row["trace_reals"] = state.real_count();
    row["trace_reals_expected"] = m * nk + n * nl;
    row["parameter_reals"] = params.size();
    row["parameter_reals_expected"] = m * (nk + nl) + n;
    row["queue_bits"] = state.queue_bits();
    row["queue_bits_expected"] = expected_bits;
    row["counts_match"] = ok;
    rows.push_back(std::move(row));
  }
  report["sizes"] = std::move(rows);
  report["per_synapse_time_ratio"] = fastest > 0.0 ? slowest / fastest : 0.0;
  report["counts_match"] = counts_ok;
  out << dump_json(report) << '\n';
  return kOk;
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& doc) {
  check_keys(doc, {"model", "trainer", "generation"}, "run config");
  RunConfig rc;
  if (doc.contains("model")) {
    check_keys(doc.at("model"), {"n_units", "temperature", "lambdas", "mus", "connectivity", "delay"},
               "model");
    rc.model = doc.at("model");
  }
  try {
    if (doc.contains("trainer")) {
      const auto& t = doc.at("trainer");
      check_keys(t, {"mode", "learning_rate", "epochs", "shuffle_seed"}, "trainer");
      if (t.contains("mode")) rc.trainer.mode = parse_train_mode(t.at("mode").get<std::string>());
      if (t.contains("learning_rate")) rc.trainer.learning_rate = t.at("learning_rate").get<double>();
      if (t.contains("epochs")) rc.trainer.epochs = t.at("epochs").get<std::size_t>();
      if (t.contains("shuffle_seed") && !t.at("shuffle_seed").is_null()) {
        rc.trainer.shuffle_seed = t.at("shuffle_seed").get<std::uint64_t>();
      }
      rc.trainer.validate();
    }
    if (doc.contains("generation")) {
      const auto& g = doc.at("generation");
      check_keys(g, {"horizon", "mode", "seed"}, "generation");
      if (g.contains("horizon")) rc.generation.horizon = g.at("horizon").get<std::size_t>();
      if (g.contains("mode")) rc.generation.mode = parse_rollout_mode(g.at("mode").get<std::string>());
      if (g.contains("seed")) rc.generation.seed = g.at("seed").get<std::uint64_t>();
      if (rc.generation.horizon == 0) throw ConfigError("generation.horizon: must be at least 1");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("run config: ") + e.what());
  }
  return rc;
}

RunConfig read_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open run config " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_run_config(doc);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic Boltzmann machine: train, evaluate, generate and verify"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train on CSV series; metrics as JSON lines on stdout");
  train->add_option("--config", train_args.config_path, "Run configuration JSON");
  train->add_option("--data", train_args.data_paths, "Series CSV (repeat for several series)")->required();
  train->add_option("--out", train_args.out_path, "Checkpoint to write")->required();
  train->add_option("--epochs", train_args.epochs);
  train->add_option("--learning-rate", train_args.learning_rate);
  train->add_option("--mode", train_args.mode, "online | full_batch");
  train->add_option("--seed", train_args.seed, "Series shuffle seed (online mode)");
  train->add_option("--backend", train_args.backend, "serial | openmp | auto");

  std::string eval_model, eval_data;
  auto* eval = app.add_subcommand("eval", "Log-likelihood and next-step accuracy on a series");
  eval->add_option("--model", eval_model)->required();
  eval->add_option("--data", eval_data)->required();

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "Autoregressive rollout as CSV on stdout");
  gen->add_option("--model", gen_args.model_path)->required();
  gen->add_option("--config", gen_args.config_path, "Run configuration JSON (generation section)");
  gen->add_option("--horizon", gen_args.horizon);
  gen->add_option("--mode", gen_args.mode, "sample | argmax");
  gen->add_option("--seed", gen_args.seed);
  gen->add_option("--primer", gen_args.primer_path, "Series CSV absorbed before generating");
  gen->add_flag("--resume", gen_args.resume, "Start from the checkpoint's saved traces");

  std::uint64_t validate_seed = validation::SuiteOptions{}.seed;
  std::string fault = "none";
  auto* val = app.add_subcommand("validate", "Run the oracle equivalence suite");
  val->add_option("--seed", validate_seed);
  val->add_option("--inject-fault", fault, "none | alpha-printed (testing only)");

  std::string kd_model;
  std::size_t kd_pre = 0, kd_post = 0, kd_max = 20;
  auto* kd = app.add_subcommand("kernel-dump", "Weight kernel of one pair as CSV");
  kd->add_option("--model", kd_model)->required();
  kd->add_option("--pre", kd_pre)->required();
  kd->add_option("--post", kd_post)->required();
  kd->add_option("--max-delta", kd_max);

  std::vector<std::size_t> bench_sizes{8, 32, 128};
  std::size_t bench_fan_in = 8, bench_steps = 2000;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "Per-synapse update time and storage audit");
  bench->add_option("--sizes", bench_sizes)->delimiter(',');
  bench->add_option("--fan-in", bench_fan_in);
  bench->add_option("--steps", bench_steps);
  bench->add_option("--seed", bench_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }

  try {
    if (*train) return cmd_train(train_args, out, err);
    if (*eval) return cmd_eval(eval_model, eval_data, out);
    if (*gen) return cmd_generate(gen_args, out);
    if (*val) return cmd_validate(validate_seed, fault, out, err);
    if (*kd) return cmd_kernel_dump(kd_model, kd_pre, kd_post, kd_max, out);
    if (*bench) return cmd_bench(bench_sizes, bench_fan_in, bench_steps, bench_seed, out);
  } catch (const DivergenceError& e) {
    err << "error: training diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const ConfigError& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kBadInput;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadInput;
}

}  // namespace dybm::cli
