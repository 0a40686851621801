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

#include <algorithm>
#include <cmath>
#include <string>

#include "doctest.h"
#include "helpers.hpp"

#include "dvq/datasets.hpp"
#include "dvq/dvq.hpp"

using namespace dvq;
using dvq::test::alternating;
using dvq::test::make_model;
using dvq::test::matrix;
using dvq::test::ramp;
using dvq::test::single_deformation_model;

namespace {

SomConfig som(std::size_t k, std::uint64_t seed = 1) {
  SomConfig c;
  c.k = k;
  c.seed = seed;
  return c;
}

// Sort-and-interpolate oracle at position (n - 1) q.
double oracle_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

ForecastEnsemble ensemble_of(std::vector<std::vector<double>> paths) {
  ForecastEnsemble e;
  for (auto& p : paths) {
    e.paths.append_row(p);
    e.seeds.push_back(0);
  }
  e.horizon = paths.front().size();
  return e;
}

const TimeSeries& sine_series() {
  static const TimeSeries s = [] {
    auto cfg = GeneratorConfig::defaults(GeneratorKind::sine_noise);
    cfg.length = 1500;
    cfg.seed = 5;
    return generate(cfg);
  }();
  return s;
}

}  // namespace

TEST_SUITE("dvq") {

TEST_CASE("transition rows are counts over support") {
  const auto t = TransitionMatrix::from_counts(3, 3, {1, 2, 1, 0, 0, 0, 0, 5, 0});
  CHECK(t.row(0)[0] == 0.25);
  CHECK(t.row(0)[1] == 0.5);
  CHECK(t.row(2)[1] == 1.0);
  CHECK(t.support(0) == 4);
  CHECK_FALSE(t.supported(1));
  CHECK(t.empty_rows() == 1);
  CHECK(t.count(2, 1) == 5);
  for (double v : t.row(1)) CHECK(v == 0.0);
  CHECK_THROWS_AS((void)TransitionMatrix::from_counts(2, 2, {1, 2, 3}), ConfigError);
}

TEST_CASE("table-sized transition matrix rows sum to one") {
  // Row values as printed (two decimals) in the 6 x 8 example matrix.
  const std::vector<std::vector<double>> printed{
      {0.12, 0, 0, 0, 0, 0, 0.23, 0.66}, {0.67, 0.30, 0, 0, 0, 0, 0.02, 0.01},
      {0.05, 0.55, 0.40, 0, 0, 0, 0, 0}, {0.03, 0, 0.30, 0.54, 0.13, 0, 0, 0},
      {0, 0, 0, 0, 0.50, 0.48, 0.02, 0}, {0.06, 0, 0, 0, 0, 0.34, 0.56, 0.04}};
  std::vector<std::uint64_t> counts;
  for (const auto& row : printed) {
    double s = 0.0;
    for (double v : row) {
      s += v;
      counts.push_back(static_cast<std::uint64_t>(std::llround(v * 100)));
    }
    CHECK(std::abs(s - 1.0) <= 0.01 + 1e-12);
  }
  const auto t = TransitionMatrix::from_counts(6, 8, counts);
  for (std::size_t i = 0; i < 6; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 8; ++j) {
      s += t.row(i)[j];
      CHECK(t.row(i)[j] == static_cast<double>(t.count(i, j)) / static_cast<double>(t.support(i)));
    }
    CHECK(std::abs(s - 1.0) < 1e-9);
  }
}

TEST_CASE("inverse cdf examples") {
  const std::vector<double> row{0.3, 0.7};
  CHECK(inverse_cdf(row, 0.25) == 0);
  CHECK(inverse_cdf(row, 0.35) == 1);
  CHECK(inverse_cdf(row, 0.99) == 1);
  const std::vector<double> sure{1.0, 0.0};
  for (double u : {0.0, 0.5, 0.999999}) CHECK(inverse_cdf(sure, u) == 0);
  // u beyond a total that rounding left short of one: the last positive entry.
  const std::vector<double> short_row{0.2, 0.3, 0.0};
  CHECK(inverse_cdf(short_row, 0.75) == 1);
  const std::vector<double> zeros_between{0.5, 0.0, 0.5};
  CHECK(inverse_cdf(zeros_between, 0.5) == 2);
}

TEST_CASE("draw frequencies follow the row") {
  const LagSpec spec(1, {0});
  Matrix defs;
  for (int j = 0; j < 8; ++j) defs.append_row(std::vector<double>{double(j)});
  const auto model = make_model(spec, matrix({{0}}), defs, {12, 0, 0, 0, 0, 0, 23, 66});
  const std::vector<double> printed{0.12, 0, 0, 0, 0, 0, 0.23, 0.66};
  Rng rng(2024);
  std::vector<double> freq(8, 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) freq[sample_deformation(model, 0, rng)] += 1.0 / n;
  for (std::size_t j = 0; j < 8; ++j) CHECK(std::abs(freq[j] - printed[j]) <= 0.01);
  CHECK(freq[1] == 0.0);
}

TEST_CASE("draw frequencies converge for an arbitrary row") {
  Rng init(77);
  std::vector<std::uint64_t> counts(10);
  for (auto& c : counts) c = init.below(50);
  counts[3] += 1;
  Matrix defs;
  for (int j = 0; j < 10; ++j) defs.append_row(std::vector<double>{double(j)});
  const auto model = make_model(LagSpec(1, {0}), matrix({{0}}), defs, counts);
  Rng rng(78);
  std::vector<double> freq(10, 0.0);
  for (int i = 0; i < 100000; ++i) freq[sample_deformation(model, 0, rng)] += 1e-5;
  for (std::size_t j = 0; j < 10; ++j) CHECK(std::abs(freq[j] - model.transition().row(0)[j]) <= 0.01);
}

TEST_CASE("model construction validates shapes and support") {
  const LagSpec spec(1, {0, 1});
  CHECK_THROWS_AS(make_model(spec, matrix({{0, 0, 0}}), matrix({{0, 0}}), {1}), ConfigError);
  CHECK_THROWS_AS(make_model(spec, matrix({{0, 0}}), matrix({{0, 0}}), {0}), DataError);
}

TEST_CASE("empty rows fall back to the nearest supported cluster") {
  const auto model = make_model(LagSpec(1, {0, 1}), matrix({{0, 0}, {1, 1}, {10, 10}}),
                                matrix({{-1, -1}, {1, 1}}), {1, 0, 0, 0, 0, 3});
  CHECK(model.effective_row(0) == 0);
  CHECK(model.effective_row(1) == 0);
  CHECK(model.effective_row(2) == 2);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) CHECK(sample_deformation(model, 1, rng) == 0);
}

TEST_CASE("alternating series gives the brute-force contingency table") {
  const TimeSeries s(alternating(200));
  const LagSpec spec(1, {0, 1});
  const auto result = fit(s, spec, som(2, 3), som(2, 4));
  const auto& model = result.model;
  const auto regs = build_regressors(s, spec);
  const auto defs = build_deformations(regs, spec);
  std::vector<std::uint64_t> table(4, 0);
  for (std::size_t r = 0; r < defs.size(); ++r) {
    const auto i = bmu(model.reg_codebook(), regs.rows.row(r));
    const auto j = bmu(model.def_codebook(), defs.rows.row(r));
    ++table[i * 2 + j];
  }
  const auto counts = model.transition().counts();
  CHECK(std::vector<std::uint64_t>(counts.begin(), counts.end()) == table);
  // Each regressor cluster maps to exactly one deformation cluster.
  for (std::size_t i = 0; i < 2; ++i) {
    const auto row = model.transition().row(i);
    CHECK(std::max(row[0], row[1]) == 1.0);
  }
  CHECK(result.report.empty_rows == 0);
  CHECK(result.report.regressors == 199);
  CHECK(result.report.deformations == 198);

  const auto ens = monte_carlo(model, s.values(), 12, 5, 9);
  for (std::size_t p = 0; p < ens.size(); ++p) {
    for (std::size_t k = 0; k < 12; ++k) CHECK(ens.paths(p, k) == static_cast<double>(k % 2));
  }
}

TEST_CASE("constant series gives a zero-deformation model") {
  const TimeSeries s(std::vector<double>(60, 4.0));
  const auto model = fit(s, LagSpec(1, {0, 1, 2}), som(2), som(2)).model;
  for (std::size_t i = 0; i < model.transition().n1(); ++i) {
    if (!model.transition().supported(i)) continue;
    for (std::size_t j = 0; j < model.transition().n2(); ++j) {
      if (model.transition().row(i)[j] > 0.0) {
        CHECK(model.transition().row(i)[j] == 1.0);
        for (double v : model.def_codebook()[j]) CHECK(v == 0.0);
      }
    }
  }
}

TEST_CASE("fit shapes and errors") {
  const auto& s = sine_series();
  const LagSpec spec(1, {0, 1, 2, 3, 5, 6});
  const auto result = fit(s, spec, som(7, 1), som(5, 2));
  CHECK(result.model.reg_codebook().dim() == 6);
  CHECK(result.model.def_codebook().dim() == 6);
  CHECK(result.model.transition().n1() == 7);
  CHECK(result.model.transition().n2() == 5);
  CHECK(result.model.seed_of_fit() == 1);
  for (std::size_t i = 0; i < 7; ++i) {
    if (!result.model.transition().supported(i)) continue;
    double sum = 0.0;
    for (double v : result.model.transition().row(i)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
  try {
    (void)fit(TimeSeries(ramp(7)), spec, som(2), som(2));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("minimum length 8") != std::string::npos);
  }
}

TEST_CASE("zero deformation keeps the history level") {
  const auto model = single_deformation_model(LagSpec(1, {0, 1}), {0, 0});
  Rng rng(1);
  const std::vector<double> history{5, 5};
  const auto path = simulate_path(model, history, 10, rng);
  REQUIRE(path.size() == 10);
  for (double v : path) CHECK(v == 5.0);
}

TEST_CASE("unit deformation extends a ramp") {
  const auto model = single_deformation_model(LagSpec(1, {0, 1}), {1, 1});
  Rng rng(1);
  const std::vector<double> history{1, 2};
  const auto path = simulate_path(model, history, 5, rng);
  CHECK(path == std::vector<double>{3, 4, 5, 6, 7});
  CHECK_THROWS_AS((void)simulate_path(model, std::vector<double>{1}, 5, rng), DataError);
}

TEST_CASE("vector blocks receive one additive correction per step") {
  const auto model = single_deformation_model(LagSpec(2, {0, 1}), {0.5, 0.25, 7, 9});
  Rng rng(1);
  const std::vector<double> history{1, 2, 3, 4};
  const auto path = simulate_path(model, history, 2, rng);
  // Newest-first block (4, 3) becomes (4.5, 3.25), appended oldest first.
  CHECK(path == std::vector<double>{3.25, 4.5, 3.5, 5.0});
}

TEST_CASE("simulation regressor is rebuilt from history and predictions") {
  const auto& s = sine_series();
  for (const auto& spec : {LagSpec::contiguous(4), LagSpec(1, {0, 1, 2, 3, 5, 6}), LagSpec(2, {0, 2})}) {
    const auto model = fit(s, spec, som(8), som(6)).model;
    Rng rng(5);
    std::vector<std::vector<double>> seen;
    std::vector<std::size_t> clusters;
    const auto path = simulate_path(model, s.values(), 30, rng, [&](const SimulationStep& st) {
      seen.emplace_back(st.regressor.begin(), st.regressor.end());
      clusters.push_back(st.cluster);
    });
    REQUIRE(seen.size() == 30);
    std::vector<double> buffer(s.values().begin(), s.values().end());
    for (std::size_t step = 0; step < 30; ++step) {
      std::vector<double> expected(spec.dim());
      spec.fill_regressor(buffer, buffer.size() - 1, expected);
      REQUIRE(seen[step] == expected);
      CHECK(clusters[step] == bmu(model.reg_codebook(), expected));
      for (std::size_t j = 0; j < spec.d(); ++j) buffer.push_back(path[step * spec.d() + j]);
    }
  }
}

TEST_CASE("monte carlo is deterministic and independent of jobs") {
  const auto& s = sine_series();
  const auto model = fit(s, LagSpec::contiguous(3), som(10), som(10)).model;
  const auto a = monte_carlo(model, s.values(), 50, 64, 123, 1);
  const auto b = monte_carlo(model, s.values(), 50, 64, 123, 1);
  const auto c = monte_carlo(model, s.values(), 50, 64, 123, 8);
  CHECK(a.paths == b.paths);
  CHECK(a.paths == c.paths);
  CHECK(a.seeds == c.seeds);
  CHECK(a.paths.rows() == 64);
  CHECK(a.paths.cols() == 50);
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(a.seeds[i] == path_seed(123, i));
    Rng rng(path_seed(123, i));
    const auto single = simulate_path(model, s.values(), 50, rng);
    const auto row = a.paths.row(i);
    CHECK(std::equal(single.begin(), single.end(), row.begin()));
  }
  CHECK_FALSE(monte_carlo(model, s.values(), 50, 64, 124, 1).paths == a.paths);
  CHECK_THROWS_AS((void)monte_carlo(model, s.values(), 50, 0, 1), ConfigError);
  CHECK_THROWS_AS((void)monte_carlo(model, s.values(), 0, 5, 1), ConfigError);
}

TEST_CASE("one-hot rows give identical paths") {
  const auto model = single_deformation_model(LagSpec(1, {0, 1}), {0.5, 0.5});
  const auto ens = monte_carlo(model, std::vector<double>{0, 1}, 20, 30, 7, 4);
  for (std::size_t p = 1; p < ens.size(); ++p) {
    const auto a = ens.paths.row(0);
    const auto b = ens.paths.row(p);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
  const auto summary = summarize(ens);
  for (std::size_t k = 0; k < summary.size(); ++k) {
    CHECK(summary.variance[k] == 0.0);
    CHECK(summary.upper[k] == summary.lower[k]);
  }
}

TEST_CASE("summary examples") {
  const auto s3 = summarize(ensemble_of({{1}, {2}, {3}}));
  CHECK(s3.mean[0] == 2.0);
  CHECK(s3.variance[0] == 1.0);

  std::vector<std::vector<double>> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back({double(i)});
  const auto s100 = summarize(ensemble_of(hundred));
  CHECK(s100.lower[0] == doctest::Approx(3.475).epsilon(1e-12));
  CHECK(s100.upper[0] == doctest::Approx(97.525).epsilon(1e-12));

  const auto single = summarize(ensemble_of({{4, 5}}));
  CHECK(single.variance == std::vector<double>{0, 0});
  CHECK(single.lower == single.upper);

  CHECK_THROWS_AS((void)summarize(ForecastEnsemble{}), DataError);
  CHECK_THROWS_AS((void)summarize(ensemble_of({{1}, {2}}), 0.9, 0.1), ConfigError);
}

TEST_CASE("quantiles match the sort-and-interpolate oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (double q : {0.0, 0.025, 0.1, 0.5, 0.77, 0.975, 1.0}) {
      CHECK(quantile_sorted(sorted, q) == doctest::Approx(oracle_quantile(v, q)).epsilon(1e-14));
    }
  }
}

TEST_CASE("summary statistics are sane on a fitted model") {
  const auto& s = sine_series();
  const auto model = fit(s, LagSpec(1, {0, 5}), som(10), som(10)).model;
  const auto ens = monte_carlo(model, s.values(), 100, 500, 3, 4);
  const auto sum = summarize(ens, 0.025, 0.975, 4);
  const auto sum1 = summarize(ens, 0.025, 0.975, 1);
  CHECK(sum.mean == sum1.mean);
  CHECK(sum.lower == sum1.lower);
  for (std::size_t k = 0; k < sum.size(); ++k) {
    CHECK(sum.variance[k] >= 0.0);
    CHECK(sum.lower[k] <= sum.mean[k]);
    CHECK(sum.mean[k] <= sum.upper[k]);
  }
}

TEST_CASE("mean can leave the band for a skewed ensemble") {
  // Documented limitation: the band is a pair of quantiles, not an interval
  // around the mean.
  std::vector<std::vector<double>> paths(99, std::vector<double>{0.0});
  paths.push_back({1000.0});
  const auto s = summarize(ensemble_of(paths));
  CHECK(s.mean[0] == doctest::Approx(10.0));
  CHECK(s.upper[0] == 0.0);
}

TEST_CASE("normalized fit forecasts in raw units") {
  const auto& s = sine_series();
  std::vector<double> scaled(s.values().begin(), s.values().end());
  for (double& v : scaled) v = 100.0 + 40.0 * v;
  FitOptions opts;
  opts.normalize = true;
  const LagSpec spec(1, {0, 5});
  const auto m1 = fit(s, spec, som(10), som(10), opts).model;
  const auto m2 = fit(TimeSeries(scaled), spec, som(10), som(10), opts).model;
  REQUIRE(m2.norm().has_value());
  const auto e1 = monte_carlo(m1, s.values(), 15, 20, 4);
  const auto e2 = monte_carlo(m2, scaled, 15, 20, 4);
  for (std::size_t i = 0; i < e1.paths.flat().size(); ++i) {
    CHECK(e2.paths.flat()[i] == doctest::Approx(100.0 + 40.0 * e1.paths.flat()[i]).epsilon(1e-6));
  }
}

}  // TEST_SUITE
