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

#include "dvq/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dvq::kernels {

int resolve_jobs(int jobs) noexcept { return jobs > 0 ? jobs : omp_get_max_threads(); }

std::size_t nearest(const Matrix& prototypes, std::span<const double> v) noexcept {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < prototypes.rows(); ++i) {
    const double d = squared_distance(prototypes.row(i), v);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

void assign_bmus(const Matrix& prototypes, const Matrix& data, std::span<std::size_t> out,
                 int jobs) {
  const auto n = static_cast<std::ptrdiff_t>(data.rows());
#pragma omp parallel for schedule(static) num_threads(resolve_jobs(jobs))
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    out[static_cast<std::size_t>(r)] = nearest(prototypes, data.row(static_cast<std::size_t>(r)));
  }
}

double neighbourhood(std::size_t i, std::size_t j, double radius) noexcept {
  if (radius <= 0.0) return i == j ? 1.0 : 0.0;
  const double dist = static_cast<double>(i > j ? i - j : j - i);
  return std::exp(-(dist * dist) / (2.0 * radius * radius));
}

void batch_epoch(Matrix& prototypes, const Matrix& data, double radius, std::span<std::size_t> bmus,
                 int jobs) {
  const std::size_t k = prototypes.rows();
  const std::size_t p = prototypes.cols();
  const std::size_t n = data.rows();
  assign_bmus(prototypes, data, bmus, jobs);

  // Per-chunk per-unit sums, then an ordered reduction over chunks.
  const std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
  std::vector<double> chunk_sums(chunks * k * p, 0.0);
  std::vector<double> chunk_counts(chunks * k, 0.0);
  const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static) num_threads(resolve_jobs(jobs))
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    const std::size_t cu = static_cast<std::size_t>(c);
    double* sums = chunk_sums.data() + cu * k * p;
    double* counts = chunk_counts.data() + cu * k;
    const std::size_t end = std::min(n, (cu + 1) * kChunkRows);
    for (std::size_t r = cu * kChunkRows; r < end; ++r) {
      const std::size_t u = bmus[r];
      const auto x = data.row(r);
      double* dst = sums + u * p;
      for (std::size_t j = 0; j < p; ++j) dst[j] += x[j];
      counts[u] += 1.0;
    }
  }
  Matrix unit_sums(k, p);
  std::vector<double> unit_counts(k, 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    const double* sums = chunk_sums.data() + c * k * p;
    const double* counts = chunk_counts.data() + c * k;
    for (std::size_t u = 0; u < k; ++u) {
      unit_counts[u] += counts[u];
      auto dst = unit_sums.row(u);
      for (std::size_t j = 0; j < p; ++j) dst[j] += sums[u * p + j];
    }
  }

  const auto kk = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(static) num_threads(resolve_jobs(jobs))
  for (std::ptrdiff_t ii = 0; ii < kk; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    std::vector<double> num(p, 0.0);
    double den = 0.0;
    for (std::size_t u = 0; u < k; ++u) {
      if (unit_counts[u] == 0.0) continue;
      const double h = neighbourhood(i, u, radius);
      if (h == 0.0) continue;
      den += h * unit_counts[u];
      const auto s = unit_sums.row(u);
      for (std::size_t j = 0; j < p; ++j) num[j] += h * s[j];
    }
    if (den > 0.0) {
      auto dst = prototypes.row(i);
      for (std::size_t j = 0; j < p; ++j) dst[j] = num[j] / den;
    }
  }
}

double quantization_error(const Matrix& prototypes, const Matrix& data, int jobs) {
  const std::size_t n = data.rows();
  const std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
  std::vector<double> partial(chunks, 0.0);
  const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static) num_threads(resolve_jobs(jobs))
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    const std::size_t cu = static_cast<std::size_t>(c);
    const std::size_t end = std::min(n, (cu + 1) * kChunkRows);
    double acc = 0.0;
    for (std::size_t r = cu * kChunkRows; r < end; ++r) {
      const auto x = data.row(r);
      acc += squared_distance(prototypes.row(nearest(prototypes, x)), x);
    }
    partial[cu] = acc;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total / static_cast<double>(n);
}

}  // namespace dvq::kernels
