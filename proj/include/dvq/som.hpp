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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dvq/common.hpp"

namespace dvq {

/// Ordered prototypes of a one-dimensional (string) SOM. Prototype i
/// neighbours i-1 and i+1.
class Codebook {
 public:
  Codebook() = default;
  /// Throws ConfigError on an empty matrix or non-finite components.
  explicit Codebook(Matrix prototypes);

  [[nodiscard]] std::size_t size() const noexcept { return prototypes_.rows(); }
  [[nodiscard]] std::size_t dim() const noexcept { return prototypes_.cols(); }
  [[nodiscard]] const Matrix& prototypes() const noexcept { return prototypes_; }
  [[nodiscard]] std::span<const double> operator[](std::size_t i) const noexcept {
    return prototypes_.row(i);
  }

  friend bool operator==(const Codebook&, const Codebook&) = default;

 private:
  Matrix prototypes_;
};

enum class SomKernel { gaussian };
enum class SomInit { sample, pca_line };

struct SomConfig {
  std::size_t k = 10;
  std::size_t epochs = 50;
  /// Unset means k / 4.
  std::optional<double> radius_start;
  double radius_end = 0.0;
  SomKernel kernel = SomKernel::gaussian;
  SomInit init = SomInit::sample;
  std::uint64_t seed = 0;

  [[nodiscard]] double start_radius() const noexcept {
    return radius_start.value_or(static_cast<double>(k) / 4.0);
  }
  /// Neighbourhood radius used in `epoch` (0-based): linear from start to end.
  [[nodiscard]] double radius_at(std::size_t epoch) const noexcept;
  /// Throws ConfigError on k == 0, epochs == 0 or a bad radius schedule.
  void validate() const;

  friend bool operator==(const SomConfig&, const SomConfig&) = default;
};

[[nodiscard]] std::string to_string(SomInit init);
[[nodiscard]] SomInit som_init_from_string(const std::string& name);

struct SomFit {
  Codebook codebook;
  /// Data rows per prototype after the final epoch; zeros are dead units.
  std::vector<std::size_t> occupancy;
  double quantization_error = 0.0;
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t dead_units() const noexcept;
};

/// Batch SOM training. Deterministic for a given (data, cfg); `jobs` only
/// changes the speed.
[[nodiscard]] SomFit train(const Matrix& data, const SomConfig& cfg, int jobs = 1);

/// Continues batch training from an existing codebook (cfg.k and cfg.init are
/// ignored; the codebook size wins).
[[nodiscard]] SomFit train_from(const Matrix& data, Codebook initial, const SomConfig& cfg,
                                int jobs = 1);

/// Initial codebook as `train` would build it.
[[nodiscard]] Codebook initial_codebook(const Matrix& data, const SomConfig& cfg);

/// Best-matching unit, lowest index on ties. Throws ConfigError on a
/// dimension mismatch.
[[nodiscard]] std::size_t bmu(const Codebook& cb, std::span<const double> v);

[[nodiscard]] std::vector<std::size_t> assign_clusters(const Codebook& cb, const Matrix& data,
                                                       int jobs = 1);

/// Mean squared distance to the BMU. Throws DataError on empty data.
[[nodiscard]] double quantization_error(const Codebook& cb, const Matrix& data, int jobs = 1);

}  // namespace dvq
