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

#include "dvq/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dvq {

TimeSeries::TimeSeries(std::vector<double> values, std::string name,
                       std::optional<std::string> sample_period)
    : values_(std::move(values)), name_(std::move(name)), sample_period_(std::move(sample_period)) {
  if (values_.empty()) throw DataError("time series is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("time series value at index " + std::to_string(i) + " is not finite");
    }
  }
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > values_.size()) {
    throw ConfigError("invalid slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                      ") of a series of length " + std::to_string(values_.size()));
  }
  return TimeSeries({values_.begin() + static_cast<std::ptrdiff_t>(begin),
                     values_.begin() + static_cast<std::ptrdiff_t>(end)},
                    name_, sample_period_);
}

TimeSeries concat(const TimeSeries& a, const TimeSeries& b) {
  std::vector<double> values(a.values().begin(), a.values().end());
  values.insert(values.end(), b.values().begin(), b.values().end());
  return TimeSeries(std::move(values), a.name(), a.sample_period());
}

LagSpec::LagSpec(std::size_t d, std::vector<std::size_t> offsets)
    : d_(d), offsets_(std::move(offsets)) {
  if (d_ == 0) throw ConfigError("lag spec: block size d must be >= 1");
  if (offsets_.empty()) throw ConfigError("lag spec: at least one offset is required");
  if (offsets_.front() != 0) throw ConfigError("lag spec: the first offset must be 0");
  for (std::size_t i = 1; i < offsets_.size(); ++i) {
    if (offsets_[i] <= offsets_[i - 1]) {
      throw ConfigError("lag spec: offsets must be strictly increasing");
    }
  }
}

void LagSpec::fill_regressor(std::span<const double> history, std::size_t end,
                             std::span<double> out) const noexcept {
  std::size_t k = 0;
  for (std::size_t offset : offsets_) {
    const std::size_t newest = end - offset * d_;
    for (std::size_t j = 0; j < d_; ++j) out[k++] = history[newest - j];
  }
}

std::size_t min_length_for(const LagSpec& spec, std::size_t regressors) noexcept {
  return spec.window() + (regressors == 0 ? 0 : regressors - 1) * spec.d();
}

RegressorSet build_regressors(std::span<const double> values, const LagSpec& spec) {
  const std::size_t n = values.size();
  const std::size_t window = spec.window();
  if (n < window) {
    throw DataError("series too short for lag spec: length " + std::to_string(n) +
                    ", minimum length " + std::to_string(window));
  }
  const std::size_t count = (n - window) / spec.d() + 1;
  RegressorSet out;
  out.ends.resize(count);
  out.rows = Matrix(count, spec.dim());
  // Align on the series end; a partial leading block is dropped.
  const std::size_t first_end = n - 1 - (count - 1) * spec.d();
  for (std::size_t r = 0; r < count; ++r) {
    out.ends[r] = first_end + r * spec.d();
    spec.fill_regressor(values, out.ends[r], out.rows.row(r));
  }
  return out;
}

DeformationSet build_deformations(const RegressorSet& regs, const LagSpec& spec) {
  const std::size_t p = regs.rows.cols();
  DeformationSet out;
  if (regs.size() < 2) {
    out.rows = Matrix(0, p);
    return out;
  }
  const std::size_t count = regs.size() - 1;
  out.ends.assign(regs.ends.begin(), regs.ends.end() - 1);
  out.rows = Matrix(count, p);
  for (std::size_t r = 0; r < count; ++r) {
    if (regs.ends[r + 1] != regs.ends[r] + spec.d()) {
      throw ConfigError("regressor rows are not stride-d aligned");
    }
    auto cur = regs.rows.row(r);
    auto next = regs.rows.row(r + 1);
    auto dst = out.rows.row(r);
    for (std::size_t j = 0; j < p; ++j) dst[j] = next[j] - cur[j];
  }
  return out;
}

Split split_chronological(const TimeSeries& series, double learn_frac, double valid_frac,
                          double test_frac, std::size_t min_segment) {
  if (!(learn_frac > 0.0) || !(valid_frac > 0.0) || !(test_frac > 0.0)) {
    throw ConfigError("split fractions must be positive");
  }
  if (std::abs(learn_frac + valid_frac + test_frac - 1.0) > 1e-9) {
    throw ConfigError("split fractions must sum to 1");
  }
  const auto n = static_cast<double>(series.size());
  const auto learn = static_cast<std::size_t>(std::llround(n * learn_frac));
  const auto valid = static_cast<std::size_t>(std::llround(n * valid_frac));
  if (learn + valid >= series.size()) throw DataError("series too short to split three ways");
  const std::size_t test = series.size() - learn - valid;
  if (std::min({learn, valid, test}) < std::max<std::size_t>(min_segment, 1)) {
    throw DataError("split produces a segment shorter than " + std::to_string(min_segment) +
                    " values (lengths " + std::to_string(learn) + "/" + std::to_string(valid) +
                    "/" + std::to_string(test) + ")");
  }
  return split_by_counts(series, learn, valid, test, 1);
}

Split split_by_counts(const TimeSeries& series, std::size_t learn, std::size_t valid,
                      std::size_t test, std::size_t unit) {
  if (unit == 0) throw ConfigError("split unit must be >= 1");
  if (learn == 0 || valid == 0 || test == 0) throw ConfigError("split counts must be positive");
  const std::size_t a = learn * unit;
  const std::size_t b = a + valid * unit;
  const std::size_t c = b + test * unit;
  if (c > series.size()) {
    throw DataError("split needs " + std::to_string(c) + " values but the series has " +
                    std::to_string(series.size()));
  }
  return {series.slice(0, a), series.slice(a, b), series.slice(b, c)};
}

NormParams fit_normalization(const TimeSeries& series) {
  const std::size_t n = series.size();
  if (n < 2) throw DataError("normalization needs at least two values");
  double mean = 0.0;
  for (double v : series.values()) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : series.values()) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DataError("cannot z-score normalize a series with zero variance");
  return {mean, sd};
}

TimeSeries normalize(const TimeSeries& series, const NormParams& params) {
  std::vector<double> out(series.values().begin(), series.values().end());
  for (double& v : out) v = (v - params.mean) / params.sd;
  return TimeSeries(std::move(out), series.name(), series.sample_period());
}

std::pair<TimeSeries, NormParams> normalize(const TimeSeries& series) {
  const NormParams params = fit_normalization(series);
  return {normalize(series, params), params};
}

double denormalize(double value, const NormParams& params) noexcept {
  return value * params.sd + params.mean;
}

TimeSeries denormalize(const TimeSeries& series, const NormParams& params) {
  std::vector<double> out(series.values().begin(), series.values().end());
  for (double& v : out) v = denormalize(v, params);
  return TimeSeries(std::move(out), series.name(), series.sample_period());
}

}  // namespace dvq
