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

#include "dvq/dvq.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "dvq/kernels.hpp"

namespace dvq {

TransitionMatrix TransitionMatrix::from_counts(std::size_t n1, std::size_t n2,
                                               std::vector<std::uint64_t> counts) {
  if (n1 == 0 || n2 == 0) throw ConfigError("transition matrix must be at least 1 x 1");
  if (counts.size() != n1 * n2) throw ConfigError("transition counts have the wrong size");
  TransitionMatrix t;
  t.n1_ = n1;
  t.n2_ = n2;
  t.counts_ = std::move(counts);
  t.support_.assign(n1, 0);
  t.probs_ = Matrix(n1, n2);
  for (std::size_t i = 0; i < n1; ++i) {
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < n2; ++j) total += t.counts_[i * n2 + j];
    t.support_[i] = total;
    if (total == 0) continue;
    for (std::size_t j = 0; j < n2; ++j) {
      t.probs_(i, j) = static_cast<double>(t.counts_[i * n2 + j]) / static_cast<double>(total);
    }
  }
  return t;
}

std::size_t TransitionMatrix::empty_rows() const noexcept {
  return static_cast<std::size_t>(std::count(support_.begin(), support_.end(), std::uint64_t{0}));
}

DvqModel::DvqModel(LagSpec spec, std::optional<NormParams> norm, Codebook reg_codebook,
                   Codebook def_codebook, SomConfig reg_config, SomConfig def_config,
                   TransitionMatrix transition, std::uint64_t seed_of_fit)
    : spec_(std::move(spec)),
      norm_(norm),
      reg_(std::move(reg_codebook)),
      def_(std::move(def_codebook)),
      reg_cfg_(reg_config),
      def_cfg_(def_config),
      transition_(std::move(transition)),
      seed_(seed_of_fit) {
  if (reg_.dim() != spec_.dim() || def_.dim() != spec_.dim()) {
    throw ConfigError("model: codebook dimension does not match the lag spec (p = " +
                      std::to_string(spec_.dim()) + ")");
  }
  if (transition_.n1() != reg_.size() || transition_.n2() != def_.size()) {
    throw ConfigError("model: transition matrix shape does not match the codebooks");
  }
  if (norm_ && !(norm_->sd > 0.0)) throw ConfigError("model: normalization sd must be positive");

  const std::size_t n1 = reg_.size();
  effective_.resize(n1);
  bool any = false;
  for (std::size_t i = 0; i < n1; ++i) any = any || transition_.supported(i);
  if (!any) throw DataError("model: transition matrix has no supported row");
  for (std::size_t i = 0; i < n1; ++i) {
    if (transition_.supported(i)) {
      effective_[i] = i;
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n1; ++j) {
      if (!transition_.supported(j)) continue;
      const double dist = squared_distance(reg_[i], reg_[j]);
      if (dist < best) {
        best = dist;
        effective_[i] = j;
      }
    }
  }
}

FitResult fit(const TimeSeries& series, const LagSpec& spec, const SomConfig& cfg_x,
              const SomConfig& cfg_y, const FitOptions& options) {
  cfg_x.validate();
  cfg_y.validate();
  const std::size_t needed = min_length_for(spec, 2);
  if (series.size() < needed) {
    throw DataError("series too short for lag spec: length " + std::to_string(series.size()) +
                    ", minimum length " + std::to_string(needed) +
                    " (two regressors are needed to form a deformation)");
  }

  std::optional<NormParams> norm;
  TimeSeries work = series;
  if (options.normalize) {
    auto [normalized, params] = normalize(series);
    work = std::move(normalized);
    norm = params;
  }

  const RegressorSet regs = build_regressors(work, spec);
  const DeformationSet defs = build_deformations(regs, spec);

  SomFit xfit = train(regs.rows, cfg_x, options.jobs);
  SomFit yfit = train(defs.rows, cfg_y, options.jobs);

  const auto reg_labels = assign_clusters(xfit.codebook, regs.rows, options.jobs);
  const auto def_labels = assign_clusters(yfit.codebook, defs.rows, options.jobs);
  const std::size_t n1 = xfit.codebook.size();
  const std::size_t n2 = yfit.codebook.size();
  std::vector<std::uint64_t> counts(n1 * n2, 0);
  // Deformation r is attached to regressor r; the final regressor has none.
  for (std::size_t r = 0; r < defs.size(); ++r) ++counts[reg_labels[r] * n2 + def_labels[r]];
  auto transition = TransitionMatrix::from_counts(n1, n2, std::move(counts));

  FitReport report;
  report.regressors = regs.size();
  report.deformations = defs.size();
  report.reg_quantization_error = xfit.quantization_error;
  report.def_quantization_error = yfit.quantization_error;
  report.reg_occupancy = xfit.occupancy;
  report.def_occupancy = yfit.occupancy;
  report.reg_dead_units = xfit.dead_units();
  report.def_dead_units = yfit.dead_units();
  report.empty_rows = transition.empty_rows();
  for (auto& w : xfit.warnings) report.warnings.push_back("regressor " + w);
  for (auto& w : yfit.warnings) report.warnings.push_back("deformation " + w);

  // The stored configs record the radius schedule actually used.
  SomConfig used_x = cfg_x;
  SomConfig used_y = cfg_y;
  used_x.radius_start = cfg_x.start_radius();
  used_y.radius_start = cfg_y.start_radius();
  DvqModel model(spec, norm, std::move(xfit.codebook), std::move(yfit.codebook), used_x, used_y,
                 std::move(transition), cfg_x.seed);
  return {std::move(model), std::move(report)};
}

std::size_t inverse_cdf(std::span<const double> row, double u) noexcept {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] <= 0.0) continue;
    cumulative += row[j];
    last_positive = j;
    if (cumulative > u) return j;
  }
  return last_positive;
}

std::size_t sample_deformation(const DvqModel& model, std::size_t cluster, Rng& rng) {
  if (cluster >= model.transition().n1()) {
    throw ConfigError("sample_deformation: cluster " + std::to_string(cluster) +
                      " out of range (n1 = " + std::to_string(model.transition().n1()) + ")");
  }
  return inverse_cdf(model.transition().row(model.effective_row(cluster)), rng.uniform());
}

std::vector<double> simulate_path(const DvqModel& model, std::span<const double> history,
                                  std::size_t horizon, Rng& rng,
                                  const SimulationObserver& observer) {
  const LagSpec& spec = model.spec();
  const std::size_t window = spec.window();
  const std::size_t d = spec.d();
  const std::size_t p = spec.dim();
  if (history.size() < window) {
    throw DataError("history too short for lag spec: length " + std::to_string(history.size()) +
                    ", minimum length " + std::to_string(window));
  }

  const auto& norm = model.norm();
  std::vector<double> buffer;
  buffer.reserve(window + horizon * d);
  for (std::size_t i = history.size() - window; i < history.size(); ++i) {
    buffer.push_back(norm ? (history[i] - norm->mean) / norm->sd : history[i]);
  }

  std::vector<double> regressor(p);
  std::vector<double> out;
  out.reserve(horizon * d);
  for (std::size_t step = 0; step < horizon; ++step) {
    spec.fill_regressor(buffer, buffer.size() - 1, regressor);
    const std::size_t cluster = kernels::nearest(model.reg_codebook().prototypes(), regressor);
    const std::size_t l = sample_deformation(model, cluster, rng);
    if (observer) observer({step, regressor, cluster, l});
    const auto deformation = model.def_codebook()[l];
    // The leading block of regressor + deformation is the next d values,
    // newest first; it is appended oldest first.
    for (std::size_t j = d; j-- > 0;) {
      const double next = regressor[j] + deformation[j];
      if (!std::isfinite(next)) {
        throw DataError("simulation produced a non-finite value at step " + std::to_string(step));
      }
      buffer.push_back(next);
      out.push_back(norm ? denormalize(next, *norm) : next);
    }
  }
  return out;
}

std::uint64_t path_seed(std::uint64_t master_seed, std::size_t path) noexcept {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(path)});
}

ForecastEnsemble monte_carlo(const DvqModel& model, std::span<const double> history,
                             std::size_t horizon, std::size_t paths, std::uint64_t master_seed,
                             int jobs) {
  if (paths == 0) throw ConfigError("monte_carlo: at least one path is required");
  if (horizon == 0) throw ConfigError("monte_carlo: horizon must be >= 1");
  const LagSpec& spec = model.spec();
  if (history.size() < spec.window()) {
    throw DataError("history too short for lag spec: length " + std::to_string(history.size()) +
                    ", minimum length " + std::to_string(spec.window()));
  }

  ForecastEnsemble ens;
  ens.horizon = horizon;
  ens.d = spec.d();
  ens.paths = Matrix(paths, horizon * spec.d());
  ens.seeds.resize(paths);
  ens.origin.resize(spec.dim());
  spec.fill_regressor(history, history.size() - 1, ens.origin);
  for (std::size_t i = 0; i < paths; ++i) ens.seeds[i] = path_seed(master_seed, i);

  std::vector<std::exception_ptr> errors(paths);
  const auto n = static_cast<std::ptrdiff_t>(paths);
#pragma omp parallel for schedule(dynamic, 4) num_threads(kernels::resolve_jobs(jobs))
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      Rng rng(ens.seeds[i]);
      const auto values = simulate_path(model, history, horizon, rng);
      std::copy(values.begin(), values.end(), ens.paths.row(i).begin());
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return ens;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
  const double pos = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

TrendSummary summarize(const ForecastEnsemble& ens, double lower_level, double upper_level,
                       int jobs) {
  if (ens.paths.rows() == 0 || ens.paths.cols() == 0) throw DataError("summarize: empty ensemble");
  if (!(lower_level > 0.0 && lower_level < 1.0 && upper_level > 0.0 && upper_level < 1.0)) {
    throw ConfigError("summarize: quantile levels must lie in (0, 1)");
  }
  if (lower_level > upper_level) throw ConfigError("summarize: lower level above upper level");
  const std::size_t n = ens.paths.rows();
  const std::size_t steps = ens.paths.cols();
  TrendSummary s;
  s.lower_level = lower_level;
  s.upper_level = upper_level;
  s.mean.resize(steps);
  s.variance.resize(steps);
  s.lower.resize(steps);
  s.upper.resize(steps);
  const auto nsteps = static_cast<std::ptrdiff_t>(steps);
#pragma omp parallel for schedule(static) num_threads(kernels::resolve_jobs(jobs))
  for (std::ptrdiff_t cc = 0; cc < nsteps; ++cc) {
    const auto c = static_cast<std::size_t>(cc);
    std::vector<double> column(n);
    for (std::size_t r = 0; r < n; ++r) column[r] = ens.paths(r, c);
    // Shifted by the first sample: identical paths give exactly zero variance.
    const double pivot = column[0];
    double shift_sum = 0.0;
    for (double v : column) shift_sum += v - pivot;
    const double shift_mean = shift_sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : column) ss += (v - pivot - shift_mean) * (v - pivot - shift_mean);
    std::sort(column.begin(), column.end());
    s.mean[c] = pivot + shift_mean;
    s.variance[c] = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    s.lower[c] = quantile_sorted(column, lower_level);
    s.upper[c] = quantile_sorted(column, upper_level);
  }
  return s;
}

}  // namespace dvq
