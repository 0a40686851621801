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
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "dvq/common.hpp"

namespace dvq {

/// A complete, finite, regularly sampled scalar series.
class TimeSeries {
 public:
  TimeSeries() = default;
  /// Throws DataError if `values` is empty or holds a non-finite value.
  explicit TimeSeries(std::vector<double> values, std::string name = {},
                      std::optional<std::string> sample_period = std::nullopt);

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::optional<std::string>& sample_period() const noexcept {
    return sample_period_;
  }

  /// Half-open slice [begin, end) keeping the metadata.
  [[nodiscard]] TimeSeries slice(std::size_t begin, std::size_t end) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> values_;
  std::string name_;
  std::optional<std::string> sample_period_;
};

/// Concatenates two series (e.g. learning and validation segments).
[[nodiscard]] TimeSeries concat(const TimeSeries& a, const TimeSeries& b);

/// Lag structure of a regressor: blocks of `d` consecutive values taken at
/// the listed block offsets into the past. Offset 0 is the most recent block.
///
/// Contiguous scalar lags {x(t), ..., x(t-p+1)} are `LagSpec::contiguous(p)`;
/// a daily-vector regressor with today, yesterday and a week ago is
/// `LagSpec{24, {0, 1, 7}}`.
class LagSpec {
 public:
  LagSpec() : LagSpec(1, {0}) {}
  /// Throws ConfigError unless d >= 1 and offsets are strictly increasing
  /// starting at 0.
  LagSpec(std::size_t d, std::vector<std::size_t> offsets);

  static LagSpec contiguous(std::size_t p) {
    std::vector<std::size_t> offs(p);
    for (std::size_t i = 0; i < p; ++i) offs[i] = i;
    return LagSpec(1, std::move(offs));
  }

  [[nodiscard]] std::size_t d() const noexcept { return d_; }
  [[nodiscard]] std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  [[nodiscard]] std::size_t blocks() const noexcept { return offsets_.size(); }
  /// Regressor dimension m*d.
  [[nodiscard]] std::size_t dim() const noexcept { return d_ * offsets_.size(); }
  /// Number of trailing values one regressor reads: d * (max offset + 1).
  [[nodiscard]] std::size_t window() const noexcept { return d_ * (offsets_.back() + 1); }

  /// Writes the regressor whose newest value is history[end] into `out`
  /// (size dim()). Blocks are most-recent-first and so are the values inside
  /// each block. Requires end + 1 >= window().
  void fill_regressor(std::span<const double> history, std::size_t end,
                      std::span<double> out) const noexcept;

  friend bool operator==(const LagSpec&, const LagSpec&) = default;

 private:
  std::size_t d_ = 1;
  std::vector<std::size_t> offsets_;
};

/// Regressors in chronological order. `ends[r]` is the 0-based index of the
/// newest series value in row r; consecutive rows are d apart.
struct RegressorSet {
  std::vector<std::size_t> ends;
  Matrix rows;

  [[nodiscard]] std::size_t size() const noexcept { return ends.size(); }
};

/// Deformations aligned with their source regressor: row r is
/// regressor(ends[r] + d) - regressor(ends[r]).
struct DeformationSet {
  std::vector<std::size_t> ends;
  Matrix rows;

  [[nodiscard]] std::size_t size() const noexcept { return ends.size(); }
};

/// Every regressor constructible from `values`, stride d, aligned so that the
/// final value of the series closes the most recent block. Throws DataError
/// naming the minimum length when not even one regressor fits.
[[nodiscard]] RegressorSet build_regressors(std::span<const double> values, const LagSpec& spec);
[[nodiscard]] inline RegressorSet build_regressors(const TimeSeries& series, const LagSpec& spec) {
  return build_regressors(series.values(), spec);
}

/// Differences between consecutive regressors; empty for a single regressor.
[[nodiscard]] DeformationSet build_deformations(const RegressorSet& regs, const LagSpec& spec);

/// Smallest series length that yields at least `regressors` regressors.
[[nodiscard]] std::size_t min_length_for(const LagSpec& spec, std::size_t regressors = 1) noexcept;

struct Split {
  TimeSeries learning;
  TimeSeries validation;
  TimeSeries test;
};

/// Contiguous split by fractions (learning earliest). The learning and
/// validation lengths are rounded to the nearest integer, the test segment
/// takes the remainder. Each segment must hold at least `min_segment` values.
[[nodiscard]] Split split_chronological(const TimeSeries& series, double learn_frac,
                                        double valid_frac, double test_frac,
                                        std::size_t min_segment = 1);

/// Contiguous split by absolute counts, measured in units of `unit` values
/// (unit = d for block series). Uses the leading (l+v+t)*unit values; the rest
/// of the series is ignored.
[[nodiscard]] Split split_by_counts(const TimeSeries& series, std::size_t learn,
                                    std::size_t valid, std::size_t test,
                                    std::size_t unit = 1);

struct NormParams {
  double mean = 0.0;
  double sd = 1.0;

  friend bool operator==(const NormParams&, const NormParams&) = default;
};

/// z-score statistics (sample sd). Throws DataError on n < 2 or zero variance.
[[nodiscard]] NormParams fit_normalization(const TimeSeries& series);
[[nodiscard]] TimeSeries normalize(const TimeSeries& series, const NormParams& params);
[[nodiscard]] std::pair<TimeSeries, NormParams> normalize(const TimeSeries& series);
[[nodiscard]] TimeSeries denormalize(const TimeSeries& series, const NormParams& params);
[[nodiscard]] double denormalize(double value, const NormParams& params) noexcept;

}  // namespace dvq
