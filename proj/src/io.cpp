#include "dybm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dybm/errors.hpp"

namespace dybm {

namespace {

using ojson = nlohmann::ordered_json;

void dump_value(const ojson& v, int indent, int depth, std::string& out) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  // Arrays of scalars stay on one line.
  auto is_flat = [](const ojson& a) {
    for (const auto& e : a) {
      if (e.is_structured()) return false;
    }
    return true;
  };
  switch (v.type()) {
    case ojson::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += ojson(key).dump();
        out += indent < 0 ? ":" : ": ";
        dump_value(item, indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case ojson::value_t::array: {
      if (v.empty() || is_flat(v)) {
        out += '[';
        for (std::size_t n = 0; n < v.size(); ++n) {
          if (n) out += indent < 0 ? "," : ", ";
          dump_value(v[n], indent, depth + 1, out);
        }
        out += ']';
        return;
      }
      out += '[';
      for (std::size_t n = 0; n < v.size(); ++n) {
        if (n) out += ',';
        newline(depth + 1);
        dump_value(v[n], -1, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    case ojson::value_t::number_float: {
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw std::invalid_argument("dump_json: non-finite number");
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
      return;
    }
    default:
      out += v.dump();
  }
}

template <class T>
T require(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + "." + key + ": " + e.what());
  }
}

std::vector<double> real_list(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw ParseError(where + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::size_t index_value(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ParseError(where + ": expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

// Reads [[pre, post, [values...]], ...] into a pair-major tensor.
std::vector<double> read_pair_tensor(const nlohmann::json& doc, const char* key,
                                     const ModelConfig& config, std::size_t width) {
  const std::string where = std::string(key);
  if (!doc.contains(key) || !doc.at(key).is_array()) throw ParseError(where + ": missing or not an array");
  const auto& rows = doc.at(key);
  if (rows.size() != config.num_pairs()) {
    throw ParseError(where + ": expected " + std::to_string(config.num_pairs()) + " pairs, found " +
                     std::to_string(rows.size()));
  }
  std::vector<double> out(config.num_pairs() * width, 0.0);
  std::vector<bool> seen(config.num_pairs(), false);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string at = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != 3) throw ParseError(at + ": expected [pre, post, [values]]");
    const auto pre = index_value(row[0], at);
    const auto post = index_value(row[1], at);
    const auto p = config.pair_index(pre, post);
    if (!p) throw ParseError(at + ": pair (" + std::to_string(pre) + "," + std::to_string(post) + ") is not connected");
    if (seen[*p]) throw ParseError(at + ": duplicate pair");
    seen[*p] = true;
    const auto values = real_list(row[2], at);
    if (values.size() != width) throw ParseError(at + ": expected " + std::to_string(width) + " values");
    for (std::size_t k = 0; k < width; ++k) {
      if (!std::isfinite(values[k])) throw ParseError(at + ": non-finite value");
      out[*p * width + k] = values[k];
    }
  }
  return out;
}

ojson pair_tensor_json(const ModelConfig& config, const std::vector<double>& values,
                       std::size_t width) {
  ojson rows = ojson::array();
  for (std::size_t p = 0; p < config.num_pairs(); ++p) {
    ojson vals = ojson::array();
    for (std::size_t k = 0; k < width; ++k) vals.push_back(values[p * width + k]);
    const auto& s = config.synapse(p);
    rows.push_back(ojson::array({s.pre, s.post, std::move(vals)}));
  }
  return rows;
}

ojson real_array(const std::vector<double>& xs) {
  ojson a = ojson::array();
  for (double x : xs) a.push_back(x);
  return a;
}

TraceState read_trace_state(const nlohmann::json& j, const ModelConfig& config) {
  TraceState s = init_state(config);
  s.alpha = read_pair_tensor(j, "alpha", config, config.num_lambdas());
  const auto& gamma = j.contains("gamma") ? j.at("gamma") : nlohmann::json();
  if (!gamma.is_array() || gamma.size() != config.n_units()) {
    throw ParseError("trace_state.gamma: expected one row per unit");
  }
  for (std::size_t i = 0; i < config.n_units(); ++i) {
    const auto row = real_list(gamma[i], "trace_state.gamma[" + std::to_string(i) + "]");
    if (row.size() != config.num_mus()) throw ParseError("trace_state.gamma: wrong row width");
    for (std::size_t l = 0; l < row.size(); ++l) s.gamma[i * config.num_mus() + l] = row[l];
  }
  const auto bits = j.contains("queues") ? j.at("queues") : nlohmann::json();
  if (!bits.is_array() || bits.size() != config.num_pairs()) {
    throw ParseError("trace_state.queues: expected one entry per pair");
  }
  std::vector<bool> seen(config.num_pairs(), false);
  for (std::size_t r = 0; r < bits.size(); ++r) {
    const std::string at = "trace_state.queues[" + std::to_string(r) + "]";
    const auto& row = bits[r];
    if (!row.is_array() || row.size() != 3 || !row[2].is_array()) throw ParseError(at + ": expected [pre, post, [bits]]");
    const auto p = config.pair_index(index_value(row[0], at), index_value(row[1], at));
    if (!p || seen[*p]) throw ParseError(at + ": unknown or duplicate pair");
    seen[*p] = true;
    std::vector<std::uint8_t> q;
    for (const auto& b : row[2]) {
      if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) {
        throw ParseError(at + ": queue entries must be 0 or 1");
      }
      q.push_back(static_cast<std::uint8_t>(b.get<int>()));
    }
    if (q.size() != s.queues[*p].size()) throw ParseError(at + ": queue length must be delay - 1");
    s.queues[*p].assign(q);
  }
  s.step_count = require<std::size_t>(j, "step_count", "trace_state");
  for (double x : s.alpha) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ParseError("trace_state.alpha: traces must be finite and >= 0");
  }
  for (double x : s.gamma) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ParseError("trace_state.gamma: traces must be finite and >= 0");
  }
  return s;
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& value, int indent) {
  std::string out;
  dump_value(value, indent, 0, out);
  return out;
}

nlohmann::ordered_json model_config_to_json(const ModelConfig& config) {
  ojson c;
  c["n_units"] = config.n_units();
  c["temperature"] = config.temperature();
  c["lambdas"] = real_array({config.lambdas().begin(), config.lambdas().end()});
  c["mus"] = real_array({config.mus().begin(), config.mus().end()});
  ojson conn = ojson::array();
  for (const auto& s : config.synapses()) conn.push_back(ojson::array({s.pre, s.post, s.delay}));
  c["connectivity"] = std::move(conn);
  return c;
}

ModelConfig model_config_from_json(const nlohmann::json& j, bool allow_defaults,
                                   std::optional<std::size_t> n_units_hint) {
  if (!j.is_object()) throw ParseError("config: expected an object");
  const std::string where = "config";
  std::size_t n = 0;
  if (j.contains("n_units")) {
    n = index_value(j.at("n_units"), where + ".n_units");
  } else if (allow_defaults && n_units_hint) {
    n = *n_units_hint;
  } else {
    throw ParseError(where + ": missing field 'n_units'");
  }
  auto reals_or = [&](const char* key, std::vector<double> fallback) {
    if (j.contains(key)) return real_list(j.at(key), where + "." + key);
    if (!allow_defaults) throw ParseError(where + ": missing field '" + key + "'");
    return fallback;
  };
  auto lambdas = reals_or("lambdas", {0.5});
  auto mus = reals_or("mus", {0.25});
  double temperature = 1.0;
  if (j.contains("temperature")) {
    if (!j.at("temperature").is_number()) throw ParseError(where + ".temperature: expected a number");
    temperature = j.at("temperature").get<double>();
  } else if (!allow_defaults) {
    throw ParseError(where + ": missing field 'temperature'");
  }

  if (!j.contains("connectivity") || (allow_defaults && j.at("connectivity") == "dense")) {
    if (!allow_defaults) throw ParseError(where + ": missing field 'connectivity'");
    int delay = 2;
    if (j.contains("delay")) {
      if (!j.at("delay").is_number_integer()) throw ParseError(where + ".delay: expected an integer");
      delay = j.at("delay").get<int>();
    }
    return ModelConfig::dense(n, delay, std::move(lambdas), std::move(mus), temperature);
  }
  const auto& conn = j.at("connectivity");
  if (!conn.is_array()) throw ParseError(where + ".connectivity: expected an array");
  std::vector<Synapse> synapses;
  for (std::size_t r = 0; r < conn.size(); ++r) {
    const auto& row = conn[r];
    const std::string at = where + ".connectivity[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != 3 || !row[2].is_number_integer()) {
      throw ParseError(at + ": expected [pre, post, delay]");
    }
    synapses.push_back({index_value(row[0], at), index_value(row[1], at), row[2].get<int>()});
  }
  return ModelConfig::create(n, std::move(lambdas), std::move(mus), std::move(synapses), temperature);
}

std::string save_checkpoint(const ModelConfig& config, const Parameters& params,
                            const TraceState* state) {
  if (!params.matches(config)) throw std::invalid_argument("save_checkpoint: parameters do not match config");
  ojson doc;
  doc["format_version"] = kCheckpointFormatVersion;
  doc["config"] = model_config_to_json(config);
  doc["bias"] = real_array(params.bias);
  doc["u"] = pair_tensor_json(config, params.u, config.num_lambdas());
  doc["v"] = pair_tensor_json(config, params.v, config.num_mus());
  if (state) {
    if (!state->matches(config)) throw std::invalid_argument("save_checkpoint: state does not match config");
    ojson ts;
    ts["alpha"] = pair_tensor_json(config, state->alpha, config.num_lambdas());
    ojson gamma = ojson::array();
    for (std::size_t i = 0; i < config.n_units(); ++i) {
      ojson row = ojson::array();
      for (std::size_t l = 0; l < config.num_mus(); ++l) row.push_back(state->gamma_at(config, i, l));
      gamma.push_back(std::move(row));
    }
    ts["gamma"] = std::move(gamma);
    ojson queues = ojson::array();
    for (std::size_t p = 0; p < config.num_pairs(); ++p) {
      const auto& s = config.synapse(p);
      ojson bits = ojson::array();
      for (auto b : state->queues[p].contents()) bits.push_back(static_cast<int>(b));
      queues.push_back(ojson::array({s.pre, s.post, std::move(bits)}));
    }
    ts["queues"] = std::move(queues);
    ts["step_count"] = state->step_count;
    doc["trace_state"] = std::move(ts);
  }
  return dump_json(doc) + "\n";
}

Checkpoint load_checkpoint(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("checkpoint: expected a JSON object");
  const int version = require<int>(doc, "format_version", "checkpoint");
  if (version != kCheckpointFormatVersion) {
    throw ParseError("checkpoint: unsupported format_version " + std::to_string(version));
  }
  if (!doc.contains("config")) throw ParseError("checkpoint: missing field 'config'");
  ModelConfig config = model_config_from_json(doc.at("config"), false);

  Parameters params = Parameters::zeros(config);
  if (!doc.contains("bias")) throw ParseError("checkpoint: missing field 'bias'");
  params.bias = real_list(doc.at("bias"), "bias");
  if (params.bias.size() != config.n_units()) throw ParseError("bias: expected n_units entries");
  params.u = read_pair_tensor(doc, "u", config, config.num_lambdas());
  params.v = read_pair_tensor(doc, "v", config, config.num_mus());
  if (!params.all_finite()) throw ParseError("checkpoint: non-finite parameter");

  std::optional<TraceState> state;
  if (doc.contains("trace_state") && !doc.at("trace_state").is_null()) {
    state = read_trace_state(doc.at("trace_state"), config);
  }
  return Checkpoint{std::move(config), std::move(params), std::move(state)};
}

void write_checkpoint_file(const std::filesystem::path& path, const ModelConfig& config,
                           const Parameters& params, const TraceState* state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << save_checkpoint(config, params, state);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint read_checkpoint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load_checkpoint(buf.str());
}

Series read_series_csv(std::istream& in, const std::string& source) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };

  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    width = split(line).size();
    break;
  }
  if (width == 0) throw ParseError(source + ": missing header row");

  Series series;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() != width) {
      throw ParseError(source + ": row " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " columns, header has " + std::to_string(width));
    }
    TimeSlice slice(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (cells[c] != "0" && cells[c] != "1") {
        throw ParseError(source + ": row " + std::to_string(line_no) + ", column " +
                         std::to_string(c + 1) + ": expected 0 or 1, got '" + cells[c] + "'");
      }
      slice[c] = cells[c] == "1" ? 1 : 0;
    }
    series.push_back(std::move(slice));
  }
  if (series.empty()) throw ParseError(source + ": no data rows");
  return series;
}

Series read_series_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open series file " + path.string());
  return read_series_csv(in, path.string());
}

void write_series_csv(std::ostream& out, const Series& series) {
  const std::size_t width = series.empty() ? 0 : series.front().size();
  for (std::size_t j = 0; j < width; ++j) out << (j ? ",u" : "u") << j;
  out << '\n';
  for (const auto& slice : series) {
    for (std::size_t j = 0; j < slice.size(); ++j) out << (j ? "," : "") << static_cast<int>(slice[j]);
    out << '\n';
  }
}

}  // namespace dybm
