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

// Declarative run description shared by every subcommand. A JSON file
// provides the base; command-line flags override individual fields.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dvq/datasets.hpp"
#include "dvq/dvq.hpp"
#include "dvq/selection.hpp"
#include "dvq/series.hpp"
#include "dvq/som.hpp"
#include "dvq/stability.hpp"

namespace dvq::cli {

inline constexpr int kRunConfigVersion = 1;

struct SplitConfig {
  /// Segment lengths in blocks of d values. All zero means "no split".
  std::size_t learning = 0;
  std::size_t validation = 0;
  std::size_t test = 0;

  [[nodiscard]] bool enabled() const noexcept { return learning + validation + test > 0; }
};

struct StabilityConfig {
  std::vector<double> scales = kDefaultProbeScales;
  double margin = 0.5;
  std::size_t steps = 100000;
  std::size_t paths = 200;
  std::size_t horizon = 500;
};

struct RunConfig {
  // Exactly one of input_file / generator is used; input_file wins.
  std::optional<std::string> input_file;
  std::optional<GeneratorConfig> generator;

  std::size_t d = 1;
  std::vector<std::size_t> offsets{0};
  SplitConfig split;
  bool normalize = false;

  std::size_t n1 = 10;
  std::size_t n2 = 10;
  SomConfig som;  // k and seed are filled per fit

  std::string grid_n1 = "5:50:5";
  std::string grid_n2 = "5:50:5";
  std::size_t validation_horizon = 0;  // 0: whole validation segment
  std::size_t validation_paths = 100;

  std::size_t horizon = 100;
  std::size_t paths = 1000;
  double lower = 0.025;
  double upper = 0.975;

  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir = "dvq_out";
  std::optional<std::string> model_path;

  StabilityConfig stability;

  [[nodiscard]] LagSpec lag_spec() const { return LagSpec(d, offsets); }
  [[nodiscard]] SweepGrid grid() const;

  /// Cross-field checks. Throws ConfigError.
  void validate() const;
};

/// Strict parse: unknown keys, wrong types and a missing or unsupported
/// "version" throw ConfigError naming the offending field.
[[nodiscard]] RunConfig run_config_from_json(const nlohmann::json& j);
[[nodiscard]] RunConfig load_run_config(const std::string& path);
[[nodiscard]] nlohmann::json to_json(const RunConfig& cfg);

[[nodiscard]] GeneratorConfig generator_config_from_json(const nlohmann::json& j,
                                                         const std::string& path);
[[nodiscard]] nlohmann::json to_json(const GeneratorConfig& cfg);

/// Parses "0,1,2,6,7".
[[nodiscard]] std::vector<std::size_t> parse_offsets(const std::string& text);

}  // namespace dvq::cli
