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

#include "dvq/som.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dvq/kernels.hpp"
#include "dvq/rng.hpp"

namespace dvq {

Codebook::Codebook(Matrix prototypes) : prototypes_(std::move(prototypes)) {
  if (prototypes_.rows() == 0 || prototypes_.cols() == 0) {
    throw ConfigError("codebook needs at least one prototype of positive dimension");
  }
  for (double v : prototypes_.flat()) {
    if (!std::isfinite(v)) throw ConfigError("codebook prototype has a non-finite component");
  }
}

double SomConfig::radius_at(std::size_t epoch) const noexcept {
  const double start = start_radius();
  if (epochs <= 1) return start;
  const double frac = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
  return start + (radius_end - start) * frac;
}

void SomConfig::validate() const {
  if (k == 0) throw ConfigError("SOM: k must be >= 1");
  if (epochs == 0) throw ConfigError("SOM: epochs must be >= 1");
  const double start = start_radius();
  if (!std::isfinite(start) || !std::isfinite(radius_end) || radius_end < 0.0 ||
      start < radius_end) {
    throw ConfigError("SOM: radius schedule must satisfy radius_start >= radius_end >= 0");
  }
}

std::string to_string(SomInit init) { return init == SomInit::sample ? "sample" : "pca_line"; }

SomInit som_init_from_string(const std::string& name) {
  if (name == "sample") return SomInit::sample;
  if (name == "pca_line") return SomInit::pca_line;
  throw ConfigError("unknown SOM init '" + name + "' (expected sample or pca_line)");
}

std::size_t SomFit::dead_units() const noexcept {
  return static_cast<std::size_t>(std::count(occupancy.begin(), occupancy.end(), std::size_t{0}));
}

namespace {

void check_data(const Matrix& data) {
  if (data.rows() == 0) throw DataError("SOM: no training data");
  if (data.cols() == 0) throw DataError("SOM: training vectors have dimension 0");
}

// k rows drawn without replacement, preferring rows whose values differ from
// those already taken so duplicated inputs do not start as twin prototypes.
Matrix sample_init(const Matrix& data, std::size_t k, std::uint64_t seed) {
  const std::size_t n = data.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  Matrix out;
  std::vector<std::size_t> taken;
  std::vector<bool> used(n, false);
  for (std::size_t pos = 0; pos < n && taken.size() < k; ++pos) {
    const auto row = data.row(order[pos]);
    const bool duplicate = std::any_of(taken.begin(), taken.end(), [&](std::size_t t) {
      return std::equal(row.begin(), row.end(), data.row(t).begin());
    });
    if (duplicate) continue;
    taken.push_back(order[pos]);
    used[pos] = true;
  }
  // Fewer distinct rows than k: fill with the remaining rows, cycling if k > n.
  for (std::size_t pos = 0; taken.size() < k; pos = (pos + 1) % n) {
    if (!used[pos] || taken.size() >= n) taken.push_back(order[pos]);
    used[pos] = true;
  }
  for (std::size_t idx : taken) out.append_row(data.row(idx));
  return out;
}

// Prototypes spread evenly along the first principal axis over the range of
// the data's projections.
Matrix pca_line_init(const Matrix& data, std::size_t k, std::uint64_t seed) {
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  std::vector<double> mean(p, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < p; ++j) mean[j] += data(r, j);
  }
  for (double& m : mean) m /= static_cast<double>(n);

  Rng rng(seed);
  std::vector<double> axis(p);
  for (double& a : axis) a = rng.normal();
  std::vector<double> next(p);
  std::vector<double> centred(p);
  for (int iter = 0; iter < 100; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < p; ++j) centred[j] = data(r, j) - mean[j];
      const double proj = dot(centred, axis);
      for (std::size_t j = 0; j < p; ++j) next[j] += proj * centred[j];
    }
    const double norm = std::sqrt(dot(next, next));
    if (!(norm > 0.0)) {
      std::fill(axis.begin(), axis.end(), 0.0);
      break;
    }
    for (std::size_t j = 0; j < p; ++j) axis[j] = next[j] / norm;
  }

  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < p; ++j) centred[j] = data(r, j) - mean[j];
    const double proj = dot(centred, axis);
    lo = std::min(lo, proj);
    hi = std::max(hi, proj);
  }
  Matrix out(k, p);
  for (std::size_t i = 0; i < k; ++i) {
    const double t = k == 1 ? 0.0
                            : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
    for (std::size_t j = 0; j < p; ++j) out(i, j) = mean[j] + t * axis[j];
  }
  return out;
}

SomFit run_epochs(const Matrix& data, Matrix prototypes, const SomConfig& cfg, int jobs) {
  std::vector<std::size_t> bmus(data.rows());
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    kernels::batch_epoch(prototypes, data, cfg.radius_at(e), bmus, jobs);
  }
  SomFit fit;
  fit.codebook = Codebook(std::move(prototypes));
  kernels::assign_bmus(fit.codebook.prototypes(), data, bmus, jobs);
  fit.occupancy.assign(fit.codebook.size(), 0);
  for (std::size_t u : bmus) ++fit.occupancy[u];
  fit.quantization_error = kernels::quantization_error(fit.codebook.prototypes(), data, jobs);
  return fit;
}

}  // namespace

Codebook initial_codebook(const Matrix& data, const SomConfig& cfg) {
  cfg.validate();
  check_data(data);
  return Codebook(cfg.init == SomInit::sample ? sample_init(data, cfg.k, cfg.seed)
                                              : pca_line_init(data, cfg.k, cfg.seed));
}

SomFit train(const Matrix& data, const SomConfig& cfg, int jobs) {
  Codebook init = initial_codebook(data, cfg);
  SomFit fit = run_epochs(data, init.prototypes(), cfg, jobs);
  if (cfg.k > data.rows()) {
    fit.warnings.push_back("SOM: k = " + std::to_string(cfg.k) + " exceeds the " +
                           std::to_string(data.rows()) + " training vectors");
  }
  return fit;
}

SomFit train_from(const Matrix& data, Codebook initial, const SomConfig& cfg, int jobs) {
  check_data(data);
  if (initial.dim() != data.cols()) throw ConfigError("SOM: codebook/data dimension mismatch");
  SomConfig resolved = cfg;
  resolved.k = initial.size();
  resolved.validate();
  return run_epochs(data, initial.prototypes(), resolved, jobs);
}

std::size_t bmu(const Codebook& cb, std::span<const double> v) {
  if (v.size() != cb.dim()) {
    throw ConfigError("bmu: vector of dimension " + std::to_string(v.size()) +
                      " against a codebook of dimension " + std::to_string(cb.dim()));
  }
  return kernels::nearest(cb.prototypes(), v);
}

std::vector<std::size_t> assign_clusters(const Codebook& cb, const Matrix& data, int jobs) {
  if (data.rows() > 0 && data.cols() != cb.dim()) {
    throw ConfigError("assign_clusters: data/codebook dimension mismatch");
  }
  std::vector<std::size_t> out(data.rows());
  kernels::assign_bmus(cb.prototypes(), data, out, jobs);
  return out;
}

double quantization_error(const Codebook& cb, const Matrix& data, int jobs) {
  if (data.rows() == 0) throw DataError("quantization_error: no data");
  if (data.cols() != cb.dim()) throw ConfigError("quantization_error: dimension mismatch");
  return kernels::quantization_error(cb.prototypes(), data, jobs);
}

}  // namespace dvq
