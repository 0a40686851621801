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

#include "doctest.h"
#include "helpers.hpp"

#include "dvq/kernels.hpp"

using namespace dvq;
using dvq::test::random_matrix;

TEST_SUITE("kernels") {

TEST_CASE("neighbourhood weights") {
  CHECK(kernels::neighbourhood(3, 3, 0.0) == 1.0);
  CHECK(kernels::neighbourhood(3, 4, 0.0) == 0.0);
  CHECK(kernels::neighbourhood(2, 2, 1.5) == 1.0);
  CHECK(kernels::neighbourhood(2, 4, 2.0) == doctest::Approx(std::exp(-4.0 / 8.0)).epsilon(1e-15));
  CHECK(kernels::neighbourhood(4, 2, 2.0) == kernels::neighbourhood(2, 4, 2.0));
}

TEST_CASE("nearest agrees with the serial reference") {
  const auto protos = random_matrix(17, 5, 1);
  const auto data = random_matrix(3000, 5, 2);
  std::vector<std::size_t> bmus(data.rows());
  kernels::assign_bmus(protos, data, bmus, 4);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    REQUIRE(bmus[r] == reference::nearest(protos, data.row(r)));
    REQUIRE(kernels::nearest(protos, data.row(r)) == bmus[r]);
  }
}

TEST_CASE("nearest breaks ties towards the lowest index") {
  const auto protos = dvq::test::matrix({{1, 0}, {-1, 0}, {1, 0}});
  const std::vector<double> v{0, 0};
  CHECK(kernels::nearest(protos, v) == 0);
  CHECK(reference::nearest(protos, v) == 0);
}

TEST_CASE("batch epoch matches the serial reference") {
  // More rows than one chunk, so the chunked reduction is exercised.
  const auto data = random_matrix(10000, 3, 3);
  for (double radius : {0.0, 0.5, 2.0, 7.0}) {
    CAPTURE(radius);
    Matrix fast = random_matrix(12, 3, 4);
    Matrix slow = fast;
    std::vector<std::size_t> b1(data.rows());
    std::vector<std::size_t> b2(data.rows());
    kernels::batch_epoch(fast, data, radius, b1, 4);
    reference::batch_epoch(slow, data, radius, b2);
    CHECK(b1 == b2);
    for (std::size_t i = 0; i < fast.flat().size(); ++i) {
      REQUIRE(fast.flat()[i] == doctest::Approx(slow.flat()[i]).epsilon(1e-11));
    }
  }
}

TEST_CASE("batch epoch is bit-identical for any thread count") {
  const auto data = random_matrix(9000, 4, 5);
  Matrix base = random_matrix(20, 4, 6);
  std::vector<std::size_t> bmus(data.rows());
  Matrix one = base;
  kernels::batch_epoch(one, data, 1.3, bmus, 1);
  for (int jobs : {2, 3, 8}) {
    Matrix many = base;
    kernels::batch_epoch(many, data, 1.3, bmus, jobs);
    CHECK(many == one);
  }
}

TEST_CASE("unit with no mass keeps its prototype") {
  const auto data = dvq::test::matrix({{0, 0}, {0.1, 0}});
  Matrix protos = dvq::test::matrix({{0, 0}, {50, 50}});
  std::vector<std::size_t> bmus(2);
  kernels::batch_epoch(protos, data, 0.0, bmus, 1);
  CHECK(protos(1, 0) == 50.0);
  CHECK(protos(1, 1) == 50.0);
  CHECK(protos(0, 0) == doctest::Approx(0.05));
}

TEST_CASE("quantization error agrees with the reference and across jobs") {
  const auto protos = random_matrix(9, 6, 7);
  const auto data = random_matrix(12000, 6, 8);
  const double q1 = kernels::quantization_error(protos, data, 1);
  CHECK(kernels::quantization_error(protos, data, 8) == q1);
  CHECK(q1 == doctest::Approx(reference::quantization_error(protos, data)).epsilon(1e-12));
}

}  // TEST_SUITE
