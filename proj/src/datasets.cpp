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

#include "dvq/datasets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dvq/report.hpp"
#include "dvq/rng.hpp"

namespace dvq {

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::mackey_glass:
      return "mackey_glass";
    case GeneratorKind::logistic:
      return "logistic";
    case GeneratorKind::sine_noise:
      return "sine_noise";
    case GeneratorKind::synthetic_load:
      return "synthetic_load";
  }
  return "unknown";
}

GeneratorKind generator_kind_from_string(const std::string& name) {
  for (auto kind : {GeneratorKind::mackey_glass, GeneratorKind::logistic,
                    GeneratorKind::sine_noise, GeneratorKind::synthetic_load}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("unknown generator '" + name +
                    "' (expected mackey_glass, logistic, sine_noise or synthetic_load)");
}

GeneratorConfig GeneratorConfig::defaults(GeneratorKind kind) {
  GeneratorConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case GeneratorKind::mackey_glass:
    case GeneratorKind::logistic:
      cfg.noise = 0.0;
      break;
    case GeneratorKind::sine_noise:
      cfg.noise = 0.05;
      break;
    case GeneratorKind::synthetic_load:
      cfg.noise = 0.3;
      cfg.noise_ar = 0.97;
      break;
  }
  return cfg;
}

void GeneratorConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("generator: ") + what);
  };
  require(length >= 1, "length must be >= 1");
  require(std::isfinite(noise) && noise >= 0.0, "noise must be >= 0");
  require(noise_ar >= 0.0 && noise_ar < 1.0, "noise_ar must lie in [0, 1)");
  switch (kind) {
    case GeneratorKind::mackey_glass:
      require(dt > 0.0 && std::isfinite(dt), "dt must be > 0");
      require(tau >= dt, "tau must be >= dt");
      require(sample_every >= dt, "sample_every must be >= dt");
      require(beta > 0.0 && gamma > 0.0 && exponent > 0.0, "beta, gamma, exponent must be > 0");
      require(x0 > 0.0, "x0 must be > 0");
      break;
    case GeneratorKind::logistic:
      require(r >= 0.0 && r <= 4.0, "r must lie in [0, 4]");
      require(logistic_x0 >= 0.0 && logistic_x0 <= 1.0, "logistic_x0 must lie in [0, 1]");
      break;
    case GeneratorKind::sine_noise:
      require(period > 0.0 && std::isfinite(period), "period must be > 0");
      require(std::isfinite(amplitude), "amplitude must be finite");
      break;
    case GeneratorKind::synthetic_load:
      require(std::isfinite(base) && std::isfinite(daily_amplitude) && std::isfinite(trend),
              "load parameters must be finite");
      require(weekly_amplitude >= 0.0 && weekly_amplitude < 1.0,
              "weekly_amplitude must lie in [0, 1)");
      break;
  }
}

namespace {

std::vector<double> mackey_glass(const GeneratorConfig& cfg, Rng& rng) {
  const auto lag = static_cast<std::size_t>(std::llround(cfg.tau / cfg.dt));
  const auto stride = static_cast<std::size_t>(std::llround(cfg.sample_every / cfg.dt));
  const std::size_t samples = cfg.burn_in + cfg.length;
  // Ring of the last lag+1 Euler states.
  std::vector<double> ring(lag + 1);
  for (double& v : ring) v = cfg.x0 + 2e-3 * (rng.uniform() - 0.5);
  std::size_t head = lag;  // index of the current state
  std::vector<double> out;
  out.reserve(cfg.length);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < stride; ++k) {
      const double x = ring[head];
      const double delayed = ring[(head + 1) % ring.size()];
      const double next =
          x + cfg.dt * (cfg.beta * delayed / (1.0 + std::pow(delayed, cfg.exponent)) - cfg.gamma * x);
      head = (head + 1) % ring.size();
      ring[head] = next;
    }
    if (s >= cfg.burn_in) out.push_back(ring[head]);
  }
  return out;
}

}  // namespace

TimeSeries generate(const GeneratorConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<double> values;
  values.reserve(cfg.length);
  std::optional<std::string> period;
  switch (cfg.kind) {
    case GeneratorKind::mackey_glass:
      values = mackey_glass(cfg, rng);
      break;
    case GeneratorKind::logistic: {
      double x = cfg.logistic_x0;
      for (std::size_t t = 0; t < cfg.length; ++t) {
        values.push_back(x);
        x = cfg.r * x * (1.0 - x);
      }
      break;
    }
    case GeneratorKind::sine_noise:
      for (std::size_t t = 0; t < cfg.length; ++t) {
        values.push_back(cfg.amplitude *
                         std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / cfg.period));
      }
      break;
    case GeneratorKind::synthetic_load:
      period = "1h";
      for (std::size_t t = 0; t < cfg.length; ++t) {
        const double hour = static_cast<double>(t % 24);
        const double shape = -std::cos(2.0 * std::numbers::pi * hour / 24.0) -
                             0.5 * std::cos(4.0 * std::numbers::pi * hour / 24.0);
        const double weekly =
            1.0 + cfg.weekly_amplitude *
                      std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 168.0);
        values.push_back(cfg.base + cfg.trend * static_cast<double>(t) +
                         cfg.daily_amplitude * shape * weekly);
      }
      break;
  }
  if (cfg.noise > 0.0) {
    const double innovation = std::sqrt(1.0 - cfg.noise_ar * cfg.noise_ar);
    double e = rng.normal();
    for (double& v : values) {
      v += cfg.noise * e;
      e = cfg.noise_ar * e + innovation * rng.normal();
    }
  }
  return TimeSeries(std::move(values), to_string(cfg.kind), period);
}

double lag_correlation(std::span<const double> x, std::size_t lag) {
  if (lag >= x.size() || x.size() - lag < 2) {
    throw DataError("lag_correlation: series too short for lag " + std::to_string(lag));
  }
  const std::size_t m = x.size() - lag;
  const auto a = x.first(m);
  const auto b = x.subspan(lag, m);
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(m);
  mb /= static_cast<double>(m);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

TimeSeries parse_csv(const std::string& text, const std::string& name) {
  std::vector<double> values;
  std::string series_name = name;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto field = trim(line);
    if (field.empty()) continue;
    double v = 0.0;
    if (!parse_number(field, v)) {
      if (lineno == 1) {
        if (series_name.empty()) series_name = std::string(field);
        continue;
      }
      throw DataError("CSV line " + std::to_string(lineno) + ": '" + std::string(field) +
                      "' is not a number");
    }
    if (!std::isfinite(v)) {
      throw DataError("CSV line " + std::to_string(lineno) + ": value is not finite");
    }
    values.push_back(v);
  }
  if (values.empty()) throw DataError("CSV input holds no values");
  return TimeSeries(std::move(values), series_name);
}

TimeSeries load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_csv(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_csv(const TimeSeries& series) {
  std::string out = series.name().empty() ? "value" : series.name();
  out += '\n';
  for (double v : series.values()) {
    out += format_number(v);
    out += '\n';
  }
  return out;
}

void save_csv(const TimeSeries& series, const std::filesystem::path& path) {
  write_file_atomic(path, format_csv(series));
}

}  // namespace dvq
