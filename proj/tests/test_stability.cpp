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
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"

#include "dvq/stability.hpp"

using namespace dvq;
using dvq::test::alternating;
using dvq::test::make_model;
using dvq::test::matrix;
using dvq::test::single_deformation_model;

namespace {

// One cluster at the origin with two equally likely deformations.
DvqModel two_deformation_model() {
  return make_model(LagSpec(1, {0, 1}), matrix({{0, 0}}), matrix({{-1, 1}, {-1, -1}}), {1, 1});
}

}  // namespace

TEST_SUITE("stability") {

TEST_CASE("drift closed form example") {
  const auto model = two_deformation_model();
  const std::vector<double> x{3, 4};
  CHECK(drift(model, x, 0) == doctest::Approx(-4.0).epsilon(1e-12));
  const auto e = cluster_expectations(model);
  CHECK(e[0].mean_deformation == std::vector<double>{-1, 0});
  CHECK(e[0].mean_squared_norm == 2.0);
  CHECK_THROWS_AS((void)drift(model, x, 1), ConfigError);
  CHECK_THROWS_AS((void)drift(model, std::vector<double>{1}, 0), ConfigError);
}

TEST_CASE("drift matches a monte carlo estimate") {
  Rng init(4);
  Matrix defs = test::random_matrix(5, 2, 6);
  std::vector<std::uint64_t> counts(5);
  for (auto& c : counts) c = 1 + init.below(9);
  const auto model = make_model(LagSpec(1, {0, 1}), matrix({{0, 0}}), defs, counts);
  const std::vector<double> x{1.5, -2.0};
  const double g0 = x[0] * x[0] + x[1] * x[1];
  Rng rng(99);
  const int n = 100000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto j = sample_deformation(model, 0, rng);
    const double a = x[0] + defs(j, 0);
    const double b = x[1] + defs(j, 1);
    const double v = a * a + b * b - g0;
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - drift(model, x, 0)) <= 3.0 * sd);
}

TEST_CASE("second moment dominates the squared mean") {
  Rng init(8);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix defs = test::random_matrix(6, 3, 100 + trial);
    std::vector<std::uint64_t> counts(12);
    for (auto& c : counts) c = init.below(5);
    counts[0] = 1;
    counts[6] = 1;
    const auto model =
        make_model(LagSpec(1, {0, 1, 2}), matrix({{0, 0, 0}, {1, 1, 1}}), defs, counts);
    for (const auto& e : cluster_expectations(model)) {
      double m2 = 0.0;
      for (double v : e.mean_deformation) m2 += v * v;
      CHECK(e.mean_squared_norm >= m2 - 1e-12);
    }
  }
}

TEST_CASE("drift is affine in the probe scale") {
  const auto model = make_model(LagSpec(1, {0, 1}), matrix({{0, 0}}),
                                matrix({{-0.5, 0.2}, {0.3, -0.7}, {0.1, 0.1}}), {3, 2, 5});
  const std::vector<double> x{0.8, -1.3};
  auto at = [&](double c) {
    const std::vector<double> y{c * x[0], c * x[1]};
    return drift(model, y, 0);
  };
  const double base = at(0.0);
  for (double c : {1.0, 2.0, 4.0}) {
    CHECK(at(c) - base == doctest::Approx(c * (at(1.0) - base)).epsilon(1e-12));
  }
}

TEST_CASE("drift verdicts") {
  const auto zero = single_deformation_model(LagSpec(1, {0, 1}), {0, 0});
  const auto zr = check_negative_drift_assumption(zero);
  CHECK(zr.boundary_count == 1);
  CHECK(zr.warn_count == 1);
  CHECK(zr.clusters[0].verdict == DriftVerdict::warn);
  CHECK(zr.clusters[0].probes.back().drift == 0.0);
  CHECK_FALSE(zr.all_pass());

  // Both clusters push up and to the right: the upper end grows without bound.
  const auto push = make_model(LagSpec(1, {0, 1}), matrix({{-1, -1}, {1, 1}}), matrix({{1, 1}}),
                               {1, 1});
  const auto pr = check_negative_drift_assumption(push, {2.0, 10.0});
  CHECK(pr.centre == std::vector<double>{0, 0});
  CHECK(pr.clusters[0].verdict == DriftVerdict::pass);
  CHECK(pr.clusters[1].verdict == DriftVerdict::warn);
  CHECK(pr.clusters[1].probes[1].drift == doctest::Approx(42.0));
  CHECK(pr.pass_count == 1);
  CHECK(pr.warn_count == 1);

  // Mean reversion towards the centre passes everywhere.
  const auto revert = make_model(LagSpec(1, {0, 1}), matrix({{-1, -1}, {1, 1}}),
                                 matrix({{0.5, 0.5}, {-0.5, -0.5}}), {1, 0, 0, 1});
  CHECK(check_negative_drift_assumption(revert).all_pass());
  CHECK_THROWS_AS((void)check_negative_drift_assumption(revert, {}), ConfigError);
  CHECK(to_string(DriftVerdict::pass) == "PASS");
  const auto j = to_json(pr);
  CHECK(j.is_object());
}

TEST_CASE("model centre is support weighted") {
  const auto model = make_model(LagSpec(1, {0}), matrix({{0}, {10}, {100}}), matrix({{0}}), {3, 1, 0});
  CHECK(model_centre(model)[0] == doctest::Approx(2.5));
}

TEST_CASE("boundary clusters") {
  const auto line = make_model(LagSpec(1, {0, 1}), matrix({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}}),
                               matrix({{0, 0}}), {1, 1, 1, 1, 1});
  CHECK(boundary_clusters(line) == std::vector<bool>{true, false, false, false, true});

  const auto square = make_model(LagSpec(1, {0, 1}),
                                 matrix({{0, 0}, {1, 0}, {2, 0}, {1, 1}, {2, 2}, {0, 2}}),
                                 matrix({{0, 0}}), {1, 1, 1, 1, 1, 1});
  // Edge midpoint (1, 0) counts as boundary; the centre (1, 1) does not.
  CHECK(boundary_clusters(square) == std::vector<bool>{true, true, true, false, true, true});

  Matrix cube;
  for (int m = 0; m < 16; ++m) {
    cube.append_row(std::vector<double>{double(m & 1), double((m >> 1) & 1), double((m >> 2) & 1),
                                        double((m >> 3) & 1)});
  }
  cube.append_row(std::vector<double>{0.5, 0.5, 0.5, 0.5});
  const auto hyper = make_model(LagSpec(1, {0, 1, 2, 3}), cube, matrix({{0, 0, 0, 0}}),
                                std::vector<std::uint64_t>(17, 1));
  const auto flags = boundary_clusters(hyper);
  for (std::size_t i = 0; i < 16; ++i) CHECK(flags[i]);
  CHECK(flags[16]);  // string end
}

TEST_CASE("fraction outside uses a closed interval") {
  const std::vector<double> v{-0.5, 0.0, 1.0, 1.5, 1.5000001, -0.6};
  CHECK(fraction_outside(v, 0.0, 1.0, 0.5) == doctest::Approx(2.0 / 6.0));
  CHECK(fraction_outside(v, 0.0, 1.0, 0.0) == doctest::Approx(4.0 / 6.0));
  CHECK(fraction_outside(std::vector<double>{}, 0.0, 1.0, 0.5) == 0.0);
}

TEST_CASE("boundedness of a ramp ensemble") {
  const auto model = single_deformation_model(LagSpec(1, {0, 1}), {1, 1});
  const auto ens = monte_carlo(model, std::vector<double>{0, 1}, 4, 3, 1);
  // Paths are 2, 3, 4, 5; range [0, 4] with margin 0.1 admits values up to 4.4.
  const TimeSeries training(std::vector<double>{0, 4});
  CHECK(boundedness_check(ens, training, 0.1) == doctest::Approx(1.0 / 4.0));
  CHECK(boundedness_check(ens, training, 0.5) == 0.0);
  CHECK_THROWS_AS((void)boundedness_check(ForecastEnsemble{}, training, 0.5), DataError);
}

TEST_CASE("occupancy frequencies") {
  const auto single = single_deformation_model(LagSpec(1, {0, 1}), {0, 0});
  const auto s1 = stationary_occupancy(single, std::vector<double>{1, 1}, 1000, 3);
  CHECK(s1.frequency == std::vector<double>{1.0});
  CHECK(s1.outside_fraction == 0.0);

  const TimeSeries alt(alternating(200));
  SomConfig c2;
  c2.k = 2;
  const auto model = fit(alt, LagSpec(1, {0, 1}), c2, c2).model;
  const std::size_t steps = 1001;
  const auto s2 = stationary_occupancy(model, alt.values(), steps, 5);
  CHECK(std::accumulate(s2.frequency.begin(), s2.frequency.end(), 0.0) == doctest::Approx(1.0));
  for (double f : s2.frequency) CHECK(std::abs(f - 0.5) <= 1.0 / static_cast<double>(steps));
  CHECK(to_json(s2)["frequency"].size() == 2);

  CHECK_THROWS_AS((void)stationary_occupancy(single, std::vector<double>{1, 1}, 0, 3), ConfigError);
}

TEST_CASE("total variation") {
  CHECK(total_variation(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}) == 0.0);
  CHECK(total_variation(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 1.0);
  CHECK(total_variation(std::vector<double>{0.2, 0.8}, std::vector<double>{0.3, 0.7}) ==
        doctest::Approx(0.1));
  CHECK_THROWS_AS((void)total_variation(std::vector<double>{1}, std::vector<double>{0.5, 0.5}),
                  ConfigError);
}

}  // TEST_SUITE
