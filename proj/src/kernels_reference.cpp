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

#include <cmath>
#include <limits>
#include <vector>

#include "dvq/kernels.hpp"

namespace dvq::reference {

std::size_t nearest(const Matrix& prototypes, std::span<const double> v) noexcept {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < prototypes.rows(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) d += (prototypes(i, j) - v[j]) * (prototypes(i, j) - v[j]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

void batch_epoch(Matrix& prototypes, const Matrix& data, double radius,
                 std::span<std::size_t> bmus) {
  const std::size_t k = prototypes.rows();
  const std::size_t p = prototypes.cols();
  for (std::size_t r = 0; r < data.rows(); ++r) bmus[r] = nearest(prototypes, data.row(r));

  Matrix num(k, p);
  std::vector<double> den(k, 0.0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      double h;
      if (radius <= 0.0) {
        h = (i == bmus[r]) ? 1.0 : 0.0;
      } else {
        const double dist = std::abs(static_cast<double>(i) - static_cast<double>(bmus[r]));
        h = std::exp(-(dist * dist) / (2.0 * radius * radius));
      }
      den[i] += h;
      for (std::size_t j = 0; j < p; ++j) num(i, j) += h * data(r, j);
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (den[i] > 0.0) {
      for (std::size_t j = 0; j < p; ++j) prototypes(i, j) = num(i, j) / den[i];
    }
  }
}

double quantization_error(const Matrix& prototypes, const Matrix& data) {
  double total = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    total += squared_distance(prototypes.row(nearest(prototypes, data.row(r))), data.row(r));
  }
  return total / static_cast<double>(data.rows());
}

}  // namespace dvq::reference
