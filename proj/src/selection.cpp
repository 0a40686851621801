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

#include "dvq/selection.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "dvq/kernels.hpp"

namespace dvq {

double sse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw ConfigError("sse: length mismatch (" + std::to_string(predicted.size()) + " vs " +
                      std::to_string(actual.size()) + ")");
  }
  if (predicted.empty()) throw ConfigError("sse: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = actual[i] - predicted[i];
    total += e * e;
  }
  return total;
}

double validation_score(const DvqModel& model, std::span<const double> history,
                        std::span<const double> validation, std::size_t horizon,
                        std::size_t paths, std::uint64_t seed, int jobs) {
  const std::size_t d = model.spec().d();
  const std::size_t available = validation.size() / d;
  if (available == 0) throw DataError("validation segment is shorter than one block");
  if (horizon == 0) horizon = available;
  if (horizon > available) {
    throw DataError("validation horizon of " + std::to_string(horizon) +
                    " steps exceeds the validation segment (" + std::to_string(available) + ")");
  }
  const auto ens = monte_carlo(model, history, horizon, paths, seed, jobs);
  std::vector<double> mean(ens.paths.cols(), 0.0);
  for (std::size_t r = 0; r < ens.paths.rows(); ++r) {
    const auto row = ens.paths.row(r);
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
  }
  for (double& m : mean) m /= static_cast<double>(ens.paths.rows());
  return sse(mean, validation.first(mean.size()));
}

void SweepGrid::validate() const {
  if (n1_values.empty() || n2_values.empty()) throw ConfigError("sweep grid: empty axis");
  for (auto v : n1_values) {
    if (v == 0) throw ConfigError("sweep grid: n1 values must be >= 1");
  }
  for (auto v : n2_values) {
    if (v == 0) throw ConfigError("sweep grid: n2 values must be >= 1");
  }
  if (paths == 0) throw ConfigError("sweep grid: paths must be >= 1");
}

namespace {
std::size_t parse_size(std::string_view s, const std::string& whole) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("invalid grid axis '" + whole + "'");
  }
  return v;
}
}  // namespace

std::vector<std::size_t> parse_grid_axis(const std::string& text) {
  std::vector<std::size_t> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string_view> parts;
    std::string_view rest = text;
    for (;;) {
      const auto pos = rest.find(':');
      parts.push_back(rest.substr(0, pos));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("invalid grid axis '" + text + "'");
    const std::size_t lo = parse_size(parts[0], text);
    const std::size_t hi = parse_size(parts[1], text);
    const std::size_t step = parts.size() == 3 ? parse_size(parts[2], text) : 1;
    if (step == 0 || lo > hi) throw ConfigError("invalid grid axis '" + text + "'");
    for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
  } else {
    std::string_view rest = text;
    for (;;) {
      const auto pos = rest.find(',');
      out.push_back(parse_size(rest.substr(0, pos), text));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
  }
  for (auto v : out) {
    if (v == 0) throw ConfigError("grid axis '" + text + "' contains 0");
  }
  return out;
}

CellSeeds cell_seeds(std::uint64_t seed, std::size_t n1, std::size_t n2) noexcept {
  return {derive_seed(seed, {n1, n2, 0}), derive_seed(seed, {n1, n2, 1}),
          derive_seed(seed, {n1, n2, 2})};
}

SomConfig som_config_for(const SomConfig& som_template, std::size_t k, std::uint64_t seed) noexcept {
  SomConfig cfg = som_template;
  cfg.k = k;
  cfg.seed = seed;
  return cfg;
}

SweepResult sweep(const TimeSeries& learning, const TimeSeries& validation, const LagSpec& spec,
                  const SweepGrid& grid, const SomConfig& som_template, std::uint64_t seed,
                  const FitOptions& options, const SweepProgress& progress) {
  grid.validate();
  SweepResult result;
  result.grid = grid;
  const std::size_t a = grid.n1_values.size();
  const std::size_t b = grid.n2_values.size();
  result.cells.resize(a * b);

  FitOptions inner = options;
  inner.jobs = 1;
  std::size_t done = 0;
  const auto total = static_cast<std::ptrdiff_t>(a * b);
#pragma omp parallel for schedule(dynamic, 1) num_threads(kernels::resolve_jobs(options.jobs))
  for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
    const auto cell_index = static_cast<std::size_t>(idx);
    SweepCell cell;
    cell.n1 = grid.n1_values[cell_index / b];
    cell.n2 = grid.n2_values[cell_index % b];
    const CellSeeds seeds = cell_seeds(seed, cell.n1, cell.n2);
    try {
      auto fitted = fit(learning, spec, som_config_for(som_template, cell.n1, seeds.reg),
                        som_config_for(som_template, cell.n2, seeds.def), inner);
      cell.reg_dead_units = fitted.report.reg_dead_units;
      cell.def_dead_units = fitted.report.def_dead_units;
      cell.empty_rows = fitted.report.empty_rows;
      cell.sse = validation_score(fitted.model, learning.values(), validation.values(),
                                  grid.horizon, grid.paths, seeds.simulation, 1);
      cell.ok = std::isfinite(cell.sse);
      cell.status = cell.ok ? "ok" : "non-finite validation error";
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.status = e.what();
    }
    if (!cell.ok) cell.sse = std::numeric_limits<double>::infinity();
    result.cells[cell_index] = cell;
#pragma omp critical(dvq_sweep_progress)
    {
      ++done;
      if (progress) progress(cell, done, a * b);
    }
  }

  const SweepCell* best = nullptr;
  for (const auto& cell : result.cells) {
    if (!cell.ok) continue;
    if (best == nullptr || cell.sse < best->sse ||
        (cell.sse == best->sse &&
         (cell.n1 + cell.n2 < best->n1 + best->n2 ||
          (cell.n1 + cell.n2 == best->n1 + best->n2 && cell.n1 < best->n1)))) {
      best = &cell;
    }
  }
  if (best == nullptr) {
    throw DataError("sweep: every grid cell failed (first error: " + result.cells.front().status +
                    ")");
  }
  result.best_n1 = best->n1;
  result.best_n2 = best->n2;
  result.best_sse = best->sse;
  return result;
}

FitResult refit_best(const TimeSeries& learning, const TimeSeries& validation, const LagSpec& spec,
                     std::size_t n1, std::size_t n2, const SomConfig& som_template,
                     std::uint64_t seed, const FitOptions& options) {
  const CellSeeds seeds = cell_seeds(seed, n1, n2);
  return fit(concat(learning, validation), spec, som_config_for(som_template, n1, seeds.reg),
             som_config_for(som_template, n2, seeds.def), options);
}

}  // namespace dvq
