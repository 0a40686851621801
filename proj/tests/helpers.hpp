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

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "dvq/dvq.hpp"
#include "dvq/rng.hpp"

namespace dvq::test {

inline Matrix matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m;
  for (const auto& r : rows) m.append_row(std::vector<double>(r));
  return m;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                            double scale = 1.0) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.flat()) v = scale * rng.normal();
  return m;
}

inline std::vector<double> ramp(std::size_t n, double start = 1.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = start + static_cast<double>(i);
  return v;
}

inline std::vector<double> alternating(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i % 2);
  return v;
}

/// Model assembled by hand: counts is n1 x n2 row-major.
inline DvqModel make_model(const LagSpec& spec, Matrix reg, Matrix def,
                           std::vector<std::uint64_t> counts) {
  const std::size_t n1 = reg.rows();
  const std::size_t n2 = def.rows();
  SomConfig cx;
  cx.k = n1;
  SomConfig cy;
  cy.k = n2;
  return DvqModel(spec, std::nullopt, Codebook(std::move(reg)), Codebook(std::move(def)), cx, cy,
                  TransitionMatrix::from_counts(n1, n2, std::move(counts)), 0);
}

/// Single regressor cluster at the origin with one deformation prototype.
inline DvqModel single_deformation_model(const LagSpec& spec, std::vector<double> deformation) {
  Matrix reg(1, spec.dim(), 0.0);
  Matrix def;
  def.append_row(deformation);
  return make_model(spec, std::move(reg), std::move(def), {1});
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("dvq_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dvq::test
