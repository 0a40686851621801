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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "dvq/series.hpp"

namespace dvq {

enum class GeneratorKind { mackey_glass, logistic, sine_noise, synthetic_load };

[[nodiscard]] std::string to_string(GeneratorKind kind);
[[nodiscard]] GeneratorKind generator_kind_from_string(const std::string& name);

/// Synthetic benchmark series. Only the fields of the selected kind matter.
struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::mackey_glass;
  std::size_t length = 1000;
  std::uint64_t seed = 0;
  /// Marginal std. dev. of the additive Gaussian noise (all kinds).
  double noise = 0.0;
  /// Lag-one autocorrelation of the noise: e_t = a e_{t-1} + sqrt(1 - a^2) noise z_t,
  /// started from its stationary law. 0 gives white noise. Must lie in [0, 1).
  double noise_ar = 0.0;

  // Mackey-Glass: dx/dt = beta x(t-tau) / (1 + x(t-tau)^exponent) - gamma x(t),
  // Euler steps of `dt`, one sample per `sample_every` time units, after
  // `burn_in` discarded samples. The constant initial history x0 is jittered
  // by the seed (uniform, +-1e-3).
  double tau = 17.0;
  double beta = 0.2;
  double gamma = 0.1;
  double exponent = 10.0;
  double dt = 0.1;
  double sample_every = 6.0;
  std::size_t burn_in = 500;
  double x0 = 1.2;

  // Logistic map x_{t+1} = r x_t (1 - x_t); starts at logistic_x0.
  double r = 4.0;
  double logistic_x0 = 0.5;

  // Sine: amplitude * sin(2 pi t / period) + noise.
  double period = 20.0;
  double amplitude = 1.0;

  // Hourly load: base + trend*t
  //   + daily_amplitude * shape(t mod 24) * (1 + weekly_amplitude * sin(2 pi t / 168))
  //   + noise, shape(h) = -cos(2 pi h / 24) - 0.5 cos(4 pi h / 24).
  double base = 10.0;
  double daily_amplitude = 3.0;
  double weekly_amplitude = 0.2;
  double trend = 0.0;

  /// Fills the per-kind defaults documented above (noise 0.0 for
  /// mackey_glass and logistic, 0.05 for sine_noise, 0.3 with noise_ar 0.97
  /// for synthetic_load).
  [[nodiscard]] static GeneratorConfig defaults(GeneratorKind kind);

  /// Throws ConfigError on out-of-range parameters.
  void validate() const;
};

/// Deterministic for a given config (including seed).
[[nodiscard]] TimeSeries generate(const GeneratorConfig& cfg);

/// Pearson correlation between x[0 .. n-lag) and x[lag .. n).
[[nodiscard]] double lag_correlation(std::span<const double> x, std::size_t lag);

/// Single numeric column, one value per line. A non-numeric first line is
/// taken as a header (the series name); blank lines are skipped. Errors name
/// the offending line.
[[nodiscard]] TimeSeries parse_csv(const std::string& text, const std::string& name = {});
[[nodiscard]] TimeSeries load_csv(const std::filesystem::path& path);

/// Header line (series name or "value") followed by shortest round-trip
/// decimal values, so save -> load is exact.
[[nodiscard]] std::string format_csv(const TimeSeries& series);
void save_csv(const TimeSeries& series, const std::filesystem::path& path);

}  // namespace dvq
