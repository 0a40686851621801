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

// Double vector quantization forecaster.
//
// Characterization: regressors and their deformations (differences between
// consecutive regressors) are quantized by two string SOMs; an empirical
// transition matrix records how often a regressor in cluster i is followed
// by a deformation in cluster j.
//
// Forecasting: from the current regressor find its cluster, draw a
// deformation prototype from that cluster's row, add it, keep the newest
// value (or newest d-block), and repeat. Repeating whole paths with
// independent random streams gives the ensemble whose statistics are the
// long-term trend.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dvq/common.hpp"
#include "dvq/rng.hpp"
#include "dvq/series.hpp"
#include "dvq/som.hpp"

namespace dvq {

/// Row-stochastic n1 x n2 matrix of empirical conditional frequencies
/// P(deformation cluster j | regressor cluster i), kept with its raw counts.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  /// counts is n1*n2 row-major. Rows are counts / row total; empty rows are
  /// all zero.
  static TransitionMatrix from_counts(std::size_t n1, std::size_t n2,
                                      std::vector<std::uint64_t> counts);

  [[nodiscard]] std::size_t n1() const noexcept { return n1_; }
  [[nodiscard]] std::size_t n2() const noexcept { return n2_; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept { return probs_.row(i); }
  [[nodiscard]] const Matrix& probabilities() const noexcept { return probs_; }
  [[nodiscard]] std::uint64_t count(std::size_t i, std::size_t j) const noexcept {
    return counts_[i * n2_ + j];
  }
  [[nodiscard]] std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  [[nodiscard]] std::uint64_t support(std::size_t i) const noexcept { return support_[i]; }
  [[nodiscard]] bool supported(std::size_t i) const noexcept { return support_[i] > 0; }
  [[nodiscard]] std::size_t empty_rows() const noexcept;

  friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;

 private:
  std::size_t n1_ = 0;
  std::size_t n2_ = 0;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> support_;
  Matrix probs_;
};

/// The fitted forecaster. Immutable once assembled.
class DvqModel {
 public:
  DvqModel() = default;

  /// Validates shapes (both codebooks of dimension spec.dim(), transition
  /// n1 x n2) and resolves the fallback row for every unsupported cluster.
  /// Throws DataError if no row has support.
  DvqModel(LagSpec spec, std::optional<NormParams> norm, Codebook reg_codebook,
           Codebook def_codebook, SomConfig reg_config, SomConfig def_config,
           TransitionMatrix transition, std::uint64_t seed_of_fit);

  [[nodiscard]] const LagSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const std::optional<NormParams>& norm() const noexcept { return norm_; }
  [[nodiscard]] const Codebook& reg_codebook() const noexcept { return reg_; }
  [[nodiscard]] const Codebook& def_codebook() const noexcept { return def_; }
  [[nodiscard]] const SomConfig& reg_config() const noexcept { return reg_cfg_; }
  [[nodiscard]] const SomConfig& def_config() const noexcept { return def_cfg_; }
  [[nodiscard]] const TransitionMatrix& transition() const noexcept { return transition_; }
  [[nodiscard]] std::uint64_t seed_of_fit() const noexcept { return seed_; }

  /// Row used when drawing from cluster i: i itself if supported, else the
  /// supported cluster whose prototype is nearest to prototype i.
  [[nodiscard]] std::size_t effective_row(std::size_t i) const noexcept { return effective_[i]; }

  friend bool operator==(const DvqModel&, const DvqModel&) = default;

 private:
  LagSpec spec_;
  std::optional<NormParams> norm_;
  Codebook reg_;
  Codebook def_;
  SomConfig reg_cfg_;
  SomConfig def_cfg_;
  TransitionMatrix transition_;
  std::uint64_t seed_ = 0;
  std::vector<std::size_t> effective_;
};

struct FitOptions {
  bool normalize = false;
  int jobs = 1;
};

struct FitReport {
  std::size_t regressors = 0;
  std::size_t deformations = 0;
  double reg_quantization_error = 0.0;
  double def_quantization_error = 0.0;
  std::vector<std::size_t> reg_occupancy;
  std::vector<std::size_t> def_occupancy;
  std::size_t reg_dead_units = 0;
  std::size_t def_dead_units = 0;
  std::size_t empty_rows = 0;
  std::vector<std::string> warnings;
};

struct FitResult {
  DvqModel model;
  FitReport report;
};

/// Builds regressors and deformations, trains both SOMs and counts the
/// (regressor cluster, deformation cluster) co-occurrences of aligned pairs.
/// The model's seed_of_fit is cfg_x.seed.
[[nodiscard]] FitResult fit(const TimeSeries& series, const LagSpec& spec, const SomConfig& cfg_x,
                            const SomConfig& cfg_y, const FitOptions& options = {});

/// Inverse-CDF draw over one probability row: the smallest j whose running
/// sum exceeds u. If rounding leaves u above the final sum, the last
/// positive entry is returned.
[[nodiscard]] std::size_t inverse_cdf(std::span<const double> row, double u) noexcept;

/// Draws a deformation prototype index for regressor cluster `cluster`,
/// using the fallback row for unsupported clusters.
[[nodiscard]] std::size_t sample_deformation(const DvqModel& model, std::size_t cluster, Rng& rng);

/// Per-step view of a running simulation; `regressor` is in model units
/// (normalized when the model carries NormParams).
struct SimulationStep {
  std::size_t step = 0;
  std::span<const double> regressor;
  std::size_t cluster = 0;
  std::size_t deformation = 0;
};
using SimulationObserver = std::function<void(const SimulationStep&)>;

/// One stochastic path of `horizon` steps starting after the last value of
/// `history`. Returns horizon*d values in chronological order, in the units of
/// `history`. Throws DataError if history is shorter than the lag window or a
/// value becomes non-finite.
[[nodiscard]] std::vector<double> simulate_path(const DvqModel& model,
                                                std::span<const double> history,
                                                std::size_t horizon, Rng& rng,
                                                const SimulationObserver& observer = {});

struct ForecastEnsemble {
  /// N rows of horizon*d values.
  Matrix paths;
  std::vector<std::uint64_t> seeds;
  /// Regressor the simulations start from (history units).
  std::vector<double> origin;
  std::size_t horizon = 0;
  std::size_t d = 1;

  [[nodiscard]] std::size_t size() const noexcept { return paths.rows(); }
};

/// Seed of path i under `master_seed`.
[[nodiscard]] std::uint64_t path_seed(std::uint64_t master_seed, std::size_t path) noexcept;

/// N independent paths; path i uses Rng(path_seed(master_seed, i)), so the
/// result does not depend on `jobs`.
[[nodiscard]] ForecastEnsemble monte_carlo(const DvqModel& model, std::span<const double> history,
                                           std::size_t horizon, std::size_t paths,
                                           std::uint64_t master_seed, int jobs = 1);

struct TrendSummary {
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> lower;
  std::vector<double> upper;
  double lower_level = 0.025;
  double upper_level = 0.975;

  [[nodiscard]] std::size_t size() const noexcept { return mean.size(); }
};

/// Sorted-sample quantile with linear interpolation between order
/// statistics at position (n-1)*q ("type 7").
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double q);

/// Per-step mean, unbiased variance (0 for a single path) and quantile band.
[[nodiscard]] TrendSummary summarize(const ForecastEnsemble& ens, double lower_level = 0.025,
                                     double upper_level = 0.975, int jobs = 1);

}  // namespace dvq
