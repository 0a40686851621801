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

// Output artifacts: CSV tables and dependency-free SVG plots.

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "dvq/dvq.hpp"
#include "dvq/selection.hpp"

namespace dvq {

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file. Creates missing parent directories. Throws
/// DataError on I/O failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest decimal text that parses back to the same double; "inf"/"nan"
/// for non-finite values.
[[nodiscard]] std::string format_number(double v);

/// One row per path: path,seed,v_1..v_{horizon*d}.
[[nodiscard]] std::string ensemble_csv(const ForecastEnsemble& ens);

/// step,mean,variance,lower,upper[,actual]. `actual` may be shorter than the
/// summary; missing cells stay empty.
[[nodiscard]] std::string summary_csv(const TrendSummary& summary,
                                      std::span<const double> actual = {});

/// n1,n2,sse,ok,reg_dead_units,def_dead_units,empty_rows,status.
[[nodiscard]] std::string sweep_csv(const SweepResult& result);

struct TrendPlot {
  std::string title;
  /// Tail of the observed series drawn before the forecast origin.
  std::span<const double> history;
  const TrendSummary* summary = nullptr;
  /// Realized values after the origin, if known.
  std::span<const double> truth;
};

/// Line chart: history, mean forecast, quantile band and optional truth.
[[nodiscard]] std::string trend_svg(const TrendPlot& plot);

/// Heat map of log10 validation SSE over the grid; the best cell is outlined
/// and failed cells are hatched grey.
[[nodiscard]] std::string sweep_heatmap_svg(const SweepResult& result,
                                            const std::string& title = "validation SSE");

}  // namespace dvq
