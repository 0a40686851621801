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

// Data-parallel inner loops of batch SOM training.
//
// `dvq::kernels` holds the OpenMP versions used by the library. Their
// reductions run over fixed-size row chunks combined in chunk order, so the
// result is bit-identical for any thread count. `dvq::reference` holds plain
// serial transcriptions of the same math, kept for tests and benchmarks.

#include <cstddef>
#include <span>

#include "dvq/common.hpp"

namespace dvq::kernels {

/// Rows per reduction chunk. Changing this changes floating-point results.
inline constexpr std::size_t kChunkRows = 4096;

/// Index of the prototype nearest to v (squared Euclidean); ties go to the
/// lowest index.
[[nodiscard]] std::size_t nearest(const Matrix& prototypes, std::span<const double> v) noexcept;

/// Nearest prototype for every data row, written to `out` (size data.rows()).
void assign_bmus(const Matrix& prototypes, const Matrix& data, std::span<std::size_t> out,
                 int jobs);

/// Gaussian neighbourhood weight over string distance; radius 0 is the
/// indicator of i == j.
[[nodiscard]] double neighbourhood(std::size_t i, std::size_t j, double radius) noexcept;

/// One batch-SOM epoch in place: assign BMUs, then set every prototype to the
/// neighbourhood-weighted mean of the data. A prototype with zero total
/// weight keeps its value. Final BMUs (before the update) go to `bmus`.
void batch_epoch(Matrix& prototypes, const Matrix& data, double radius, std::span<std::size_t> bmus,
                 int jobs);

/// Mean squared distance from each row to its nearest prototype.
[[nodiscard]] double quantization_error(const Matrix& prototypes, const Matrix& data, int jobs);

/// Sets the OpenMP team size for `jobs` (<= 0 means the runtime default).
[[nodiscard]] int resolve_jobs(int jobs) noexcept;

}  // namespace dvq::kernels

namespace dvq::reference {

[[nodiscard]] std::size_t nearest(const Matrix& prototypes, std::span<const double> v) noexcept;

/// Textbook batch update: prototype_i = sum_x h(i, bmu(x)) x / sum_x h(i, bmu(x)).
void batch_epoch(Matrix& prototypes, const Matrix& data, double radius,
                 std::span<std::size_t> bmus);

[[nodiscard]] double quantization_error(const Matrix& prototypes, const Matrix& data);

}  // namespace dvq::reference
