// Copyright 2026 The dvq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <algorithm>
#include <set>

namespace dvq::cli {

using nlohmann::json;

namespace {

// Reads the fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  [[nodiscard]] bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  [[nodiscard]] const json& at(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  [[nodiscard]] std::string field(const std::string& key) const { return path_ + "." + key; }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    const std::string where = field(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where + ": expected a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where + ": expected a string");
      out = v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where + ": expected a number");
      out = v.get<T>();
    } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) throw ConfigError(where + ": expected a non-negative integer");
      out = v.get<T>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
      out = v.get<T>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported field type");
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (seen_.count(key) == 0) throw ConfigError(field(key) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T>
std::vector<T> read_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& e = v[i];
    if constexpr (std::is_floating_point_v<T>) {
      if (!e.is_number()) throw ConfigError(where + "[" + std::to_string(i) + "]: expected a number");
    } else {
      if (!e.is_number_unsigned()) {
        throw ConfigError(where + "[" + std::to_string(i) + "]: expected a non-negative integer");
      }
    }
    out.push_back(e.get<T>());
  }
  return out;
}

// A grid axis is either the string syntax of parse_grid_axis or an array.
std::string read_axis(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  const auto values = read_array<std::size_t>(v, where);
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

GeneratorConfig generator_config_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  if (!r.has("kind")) throw ConfigError(path + ".kind: missing");
  if (!r.at("kind").is_string()) throw ConfigError(path + ".kind: expected a string");
  GeneratorConfig cfg = GeneratorConfig::defaults(generator_kind_from_string(r.at("kind").get<std::string>()));
  r.read("length", cfg.length);
  r.read("seed", cfg.seed);
  r.read("noise", cfg.noise);
  r.read("noise_ar", cfg.noise_ar);
  r.read("tau", cfg.tau);
  r.read("beta", cfg.beta);
  r.read("gamma", cfg.gamma);
  r.read("exponent", cfg.exponent);
  r.read("dt", cfg.dt);
  r.read("sample_every", cfg.sample_every);
  r.read("burn_in", cfg.burn_in);
  r.read("x0", cfg.x0);
  r.read("r", cfg.r);
  r.read("logistic_x0", cfg.logistic_x0);
  r.read("period", cfg.period);
  r.read("amplitude", cfg.amplitude);
  r.read("base", cfg.base);
  r.read("daily_amplitude", cfg.daily_amplitude);
  r.read("weekly_amplitude", cfg.weekly_amplitude);
  r.read("trend", cfg.trend);
  r.finish();
  return cfg;
}

json to_json(const GeneratorConfig& cfg) {
  json j = {{"kind", to_string(cfg.kind)},
            {"length", cfg.length},
            {"seed", cfg.seed},
            {"noise", cfg.noise},
            {"noise_ar", cfg.noise_ar}};
  switch (cfg.kind) {
    case GeneratorKind::mackey_glass:
      j.update({{"tau", cfg.tau},
                {"beta", cfg.beta},
                {"gamma", cfg.gamma},
                {"exponent", cfg.exponent},
                {"dt", cfg.dt},
                {"sample_every", cfg.sample_every},
                {"burn_in", cfg.burn_in},
                {"x0", cfg.x0}});
      break;
    case GeneratorKind::logistic:
      j.update({{"r", cfg.r}, {"logistic_x0", cfg.logistic_x0}});
      break;
    case GeneratorKind::sine_noise:
      j.update({{"period", cfg.period}, {"amplitude", cfg.amplitude}});
      break;
    case GeneratorKind::synthetic_load:
      j.update({{"base", cfg.base},
                {"daily_amplitude", cfg.daily_amplitude},
                {"weekly_amplitude", cfg.weekly_amplitude},
                {"trend", cfg.trend}});
      break;
  }
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  ObjectReader root(j, "config");
  if (!root.has("version")) throw ConfigError("config.version: missing");
  if (!root.at("version").is_number_integer() ||
      root.at("version").get<int>() != kRunConfigVersion) {
    throw ConfigError("config.version: unsupported (expected " +
                      std::to_string(kRunConfigVersion) + ")");
  }

  if (root.has("input")) {
    ObjectReader in(root.at("input"), "config.input");
    if (in.has("file")) {
      std::string file;
      in.read("file", file);
      cfg.input_file = file;
    }
    if (in.has("generator")) {
      cfg.generator = generator_config_from_json(in.at("generator"), "config.input.generator");
    }
    in.finish();
    if (cfg.input_file && cfg.generator) {
      throw ConfigError("config.input: give either file or generator, not both");
    }
  }

  if (root.has("lag")) {
    ObjectReader lag(root.at("lag"), "config.lag");
    lag.read("d", cfg.d);
    if (lag.has("offsets")) cfg.offsets = read_array<std::size_t>(lag.at("offsets"), lag.field("offsets"));
    if (lag.has("p")) {
      if (j.at("lag").contains("offsets")) {
        throw ConfigError("config.lag: give either p or offsets, not both");
      }
      std::size_t p = 0;
      lag.read("p", p);
      if (p == 0) throw ConfigError("config.lag.p: must be >= 1");
      const auto spec = LagSpec::contiguous(p);
      cfg.offsets.assign(spec.offsets().begin(), spec.offsets().end());
    }
    lag.finish();
  }

  if (root.has("split")) {
    ObjectReader s(root.at("split"), "config.split");
    s.read("learning", cfg.split.learning);
    s.read("validation", cfg.split.validation);
    s.read("test", cfg.split.test);
    s.finish();
  }

  root.read("normalize", cfg.normalize);

  if (root.has("som")) {
    ObjectReader s(root.at("som"), "config.som");
    s.read("n1", cfg.n1);
    s.read("n2", cfg.n2);
    s.read("epochs", cfg.som.epochs);
    if (s.has("radius_start")) {
      double r = 0.0;
      s.read("radius_start", r);
      cfg.som.radius_start = r;
    }
    s.read("radius_end", cfg.som.radius_end);
    if (s.has("init")) {
      std::string init;
      s.read("init", init);
      cfg.som.init = som_init_from_string(init);
    }
    s.finish();
  }

  if (root.has("sweep")) {
    ObjectReader s(root.at("sweep"), "config.sweep");
    if (s.has("n1")) cfg.grid_n1 = read_axis(s.at("n1"), s.field("n1"));
    if (s.has("n2")) cfg.grid_n2 = read_axis(s.at("n2"), s.field("n2"));
    s.read("horizon", cfg.validation_horizon);
    s.read("paths", cfg.validation_paths);
    s.finish();
  }

  if (root.has("forecast")) {
    ObjectReader f(root.at("forecast"), "config.forecast");
    f.read("horizon", cfg.horizon);
    f.read("paths", cfg.paths);
    f.read("lower", cfg.lower);
    f.read("upper", cfg.upper);
    f.finish();
  }

  if (root.has("stability")) {
    ObjectReader s(root.at("stability"), "config.stability");
    if (s.has("scales")) cfg.stability.scales = read_array<double>(s.at("scales"), s.field("scales"));
    s.read("margin", cfg.stability.margin);
    s.read("steps", cfg.stability.steps);
    s.read("paths", cfg.stability.paths);
    s.read("horizon", cfg.stability.horizon);
    s.finish();
  }

  root.read("seed", cfg.seed);
  root.read("jobs", cfg.jobs);
  root.read("out_dir", cfg.out_dir);
  if (root.has("model")) {
    std::string m;
    root.read("model", m);
    cfg.model_path = m;
  }
  root.finish();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["version"] = kRunConfigVersion;
  json input = json::object();
  if (cfg.input_file) input["file"] = *cfg.input_file;
  if (cfg.generator && !cfg.input_file) input["generator"] = to_json(*cfg.generator);
  j["input"] = input;
  j["lag"] = {{"d", cfg.d}, {"offsets", cfg.offsets}};
  j["split"] = {{"learning", cfg.split.learning},
                {"validation", cfg.split.validation},
                {"test", cfg.split.test}};
  j["normalize"] = cfg.normalize;
  json som = {{"n1", cfg.n1},
              {"n2", cfg.n2},
              {"epochs", cfg.som.epochs},
              {"radius_end", cfg.som.radius_end},
              {"init", to_string(cfg.som.init)}};
  if (cfg.som.radius_start) som["radius_start"] = *cfg.som.radius_start;
  j["som"] = som;
  j["sweep"] = {{"n1", cfg.grid_n1},
                {"n2", cfg.grid_n2},
                {"horizon", cfg.validation_horizon},
                {"paths", cfg.validation_paths}};
  j["forecast"] = {{"horizon", cfg.horizon},
                   {"paths", cfg.paths},
                   {"lower", cfg.lower},
                   {"upper", cfg.upper}};
  j["stability"] = {{"scales", cfg.stability.scales},
                    {"margin", cfg.stability.margin},
                    {"steps", cfg.stability.steps},
                    {"paths", cfg.stability.paths},
                    {"horizon", cfg.stability.horizon}};
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  j["out_dir"] = cfg.out_dir;
  if (cfg.model_path) j["model"] = *cfg.model_path;
  return j;
}

SweepGrid RunConfig::grid() const {
  SweepGrid g;
  g.n1_values = parse_grid_axis(grid_n1);
  g.n2_values = parse_grid_axis(grid_n2);
  g.horizon = validation_horizon;
  g.paths = validation_paths;
  return g;
}

void RunConfig::validate() const {
  (void)lag_spec();
  if (n1 == 0 || n2 == 0) throw ConfigError("som.n1 and som.n2 must be >= 1");
  SomConfig probe = som;
  probe.k = std::max(n1, n2);
  probe.validate();
  grid().validate();
  if (horizon == 0) throw ConfigError("forecast.horizon must be >= 1");
  if (paths == 0) throw ConfigError("forecast.paths must be >= 1");
  if (!(lower >= 0.0 && lower < upper && upper <= 1.0)) {
    throw ConfigError("forecast.lower/upper must satisfy 0 <= lower < upper <= 1");
  }
  if (jobs < 0) throw ConfigError("jobs must be >= 0 (0 = all cores)");
  if (stability.scales.empty()) throw ConfigError("stability.scales must not be empty");
  for (double s : stability.scales) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("stability.scales must be > 0");
  }
  if (!(stability.margin >= 0.0)) throw ConfigError("stability.margin must be >= 0");
  if (stability.steps == 0 || stability.paths == 0 || stability.horizon == 0) {
    throw ConfigError("stability.steps, paths and horizon must be >= 1");
  }
  if (generator) generator->validate();
}

std::vector<std::size_t> parse_offsets(const std::string& text) {
  std::vector<std::size_t> out;
  std::string_view rest = text;
  for (;;) {
    const auto pos = rest.find(',');
    const auto item = rest.substr(0, pos);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError("invalid offset list '" + text + "'");
    }
    out.push_back(v);
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  return out;
}

}  // namespace dvq::cli
