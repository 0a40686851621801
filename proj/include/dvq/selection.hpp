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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dvq/dvq.hpp"

namespace dvq {

/// Sum of squared differences over all components. Throws ConfigError on a
/// length mismatch or empty input.
[[nodiscard]] double sse(std::span<const double> predicted, std::span<const double> actual);

/// Simulates `paths` paths of `horizon` steps from the end of `history`,
/// averages them, and scores the mean path against the first horizon*d
/// values of `validation`. horizon == 0 means as many whole steps as the
/// validation segment holds.
[[nodiscard]] double validation_score(const DvqModel& model, std::span<const double> history,
                                      std::span<const double> validation, std::size_t horizon,
                                      std::size_t paths, std::uint64_t seed, int jobs = 1);

struct SweepGrid {
  std::vector<std::size_t> n1_values;
  std::vector<std::size_t> n2_values;
  /// Validation horizon in steps; 0 = whole validation segment.
  std::size_t horizon = 0;
  std::size_t paths = 100;

  void validate() const;
};

/// Parses a grid axis: "a:b:s" (inclusive range with step), "a:b" (step 1),
/// a comma list "3,5,8", or a single value.
[[nodiscard]] std::vector<std::size_t> parse_grid_axis(const std::string& text);

struct SweepCell {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  /// +infinity when the cell failed.
  double sse = 0.0;
  bool ok = false;
  std::string status;
  std::size_t reg_dead_units = 0;
  std::size_t def_dead_units = 0;
  std::size_t empty_rows = 0;
};

struct SweepResult {
  SweepGrid grid;
  /// Row-major over (n1_values, n2_values).
  std::vector<SweepCell> cells;
  std::size_t best_n1 = 0;
  std::size_t best_n2 = 0;
  double best_sse = 0.0;

  [[nodiscard]] const SweepCell& at(std::size_t i1, std::size_t i2) const {
    return cells[i1 * grid.n2_values.size() + i2];
  }
};

/// Seeds a cell's regressor SOM, deformation SOM and validation simulation.
struct CellSeeds {
  std::uint64_t reg = 0;
  std::uint64_t def = 0;
  std::uint64_t simulation = 0;
};
[[nodiscard]] CellSeeds cell_seeds(std::uint64_t seed, std::size_t n1, std::size_t n2) noexcept;

/// Completed cell, in completion order (not grid order).
using SweepProgress = std::function<void(const SweepCell& cell, std::size_t done, std::size_t total)>;

/// Fits one model per (n1, n2) on `learning` and scores it on `validation`.
/// Failed cells get infinite SSE and a diagnostic. The best cell minimizes
/// the SSE, ties going to the smaller n1 + n2 and then the smaller n1.
/// Throws DataError if every cell fails.
[[nodiscard]] SweepResult sweep(const TimeSeries& learning, const TimeSeries& validation,
                                const LagSpec& spec, const SweepGrid& grid,
                                const SomConfig& som_template, std::uint64_t seed,
                                const FitOptions& options = {}, const SweepProgress& progress = {});

/// Single fit on learning ++ validation with the selected prototype counts,
/// seeded exactly like the corresponding sweep cell.
[[nodiscard]] FitResult refit_best(const TimeSeries& learning, const TimeSeries& validation,
                                   const LagSpec& spec, std::size_t n1, std::size_t n2,
                                   const SomConfig& som_template, std::uint64_t seed,
                                   const FitOptions& options = {});

/// Template with k and seed filled in for one SOM.
[[nodiscard]] SomConfig som_config_for(const SomConfig& som_template, std::size_t k,
                                       std::uint64_t seed) noexcept;

}  // namespace dvq
