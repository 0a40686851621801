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

// JSON model file:
//
//   {
//     "format_version": 1,
//     "spec": {"d": 1, "offsets": [0, 1, 2, 3, 5, 6]},
//     "norm": null | {"mean": m, "sd": s},
//     "reg_codebook": {"k": n1, "p": p, "prototypes": [[...], ...], "config": {...}},
//     "def_codebook": {"k": n2, "p": p, "prototypes": [[...], ...], "config": {...}},
//     "transition": {"counts": [[...], ...], "rows": [[...], ...]},
//     "seed_of_fit": 42
//   }
//
// "config" holds the SomConfig used: k, epochs, radius_start, radius_end,
// kernel, init, seed. Doubles are written in shortest round-trip form, so a
// saved model reloads bit-identically.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "dvq/dvq.hpp"

namespace dvq {

inline constexpr int kModelFormatVersion = 1;

/// Raised when a model document does not match the schema. The message
/// names the offending field path (e.g. "transition.rows[2]").
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

[[nodiscard]] nlohmann::json to_json(const SomConfig& cfg);
[[nodiscard]] SomConfig som_config_from_json(const nlohmann::json& j, const std::string& path);

[[nodiscard]] nlohmann::json to_json(const DvqModel& model);
[[nodiscard]] DvqModel model_from_json(const nlohmann::json& j);

[[nodiscard]] std::string serialize_model(const DvqModel& model);
[[nodiscard]] DvqModel parse_model(const std::string& text);

void save_model(const DvqModel& model, const std::filesystem::path& path);
[[nodiscard]] DvqModel load_model(const std::filesystem::path& path);

}  // namespace dvq
