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
#include <string>

#include "doctest.h"
#include "helpers.hpp"

#include "dvq/datasets.hpp"

using namespace dvq;

TEST_SUITE("datasets") {

TEST_CASE("generator names") {
  for (auto kind : {GeneratorKind::mackey_glass, GeneratorKind::logistic, GeneratorKind::sine_noise,
                    GeneratorKind::synthetic_load}) {
    CHECK(generator_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS((void)generator_kind_from_string("lorenz"), ConfigError);
}

TEST_CASE("logistic map from one half") {
  auto cfg = GeneratorConfig::defaults(GeneratorKind::logistic);
  cfg.length = 4;
  const auto s = generate(cfg);
  CHECK(std::vector<double>(s.values().begin(), s.values().end()) ==
        std::vector<double>{0.5, 1.0, 0.0, 0.0});
}

TEST_CASE("noise-free sine repeats at its period") {
  auto cfg = GeneratorConfig::defaults(GeneratorKind::sine_noise);
  cfg.noise = 0.0;
  cfg.length = 400;
  const auto s = generate(cfg);
  CHECK(lag_correlation(s.values(), 20) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lag_correlation(s.values(), 10) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(s[5] == doctest::Approx(1.0));
}

TEST_CASE("sine noise has the requested spread") {
  auto cfg = GeneratorConfig::defaults(GeneratorKind::sine_noise);
  cfg.length = 20000;
  cfg.noise = 0.5;
  auto clean_cfg = cfg;
  clean_cfg.noise = 0.0;
  const auto noisy = generate(cfg);
  const auto clean = generate(clean_cfg);
  double ss = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) ss += std::pow(noisy[i] - clean[i], 2);
  CHECK(std::sqrt(ss / static_cast<double>(noisy.size())) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("persistent noise keeps its marginal spread") {
  auto cfg = GeneratorConfig::defaults(GeneratorKind::sine_noise);
  cfg.length = 200000;
  cfg.noise = 1.0;
  cfg.noise_ar = 0.9;
  auto clean_cfg = cfg;
  clean_cfg.noise = 0.0;
  const auto noisy = generate(cfg);
  const auto clean = generate(clean_cfg);
  std::vector<double> e(noisy.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = noisy[i] - clean[i];
    ss += e[i] * e[i];
  }
  CHECK(std::sqrt(ss / static_cast<double>(e.size())) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(lag_correlation(e, 1) == doctest::Approx(0.9).epsilon(0.02));
}

TEST_CASE("load series has a daily cycle") {
  auto cfg = GeneratorConfig::defaults(GeneratorKind::synthetic_load);
  cfg.length = 9600;
  const auto s = generate(cfg);
  CHECK(s.size() == 9600);
  CHECK(s.sample_period() == std::optional<std::string>("1h"));
  CHECK(lag_correlation(s.values(), 24) > 0.8);
}

TEST_CASE("mackey-glass stays in its attractor band") {
  auto cfg = GeneratorConfig::defaults(GeneratorKind::mackey_glass);
  cfg.length = 2000;
  const auto s = generate(cfg);
  double lo = s[0];
  double hi = s[0];
  for (double v : s.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo > 0.2);
  CHECK(hi < 1.5);
  CHECK(hi - lo > 0.5);
}

TEST_CASE("generators are deterministic per seed") {
  for (auto kind : {GeneratorKind::mackey_glass, GeneratorKind::sine_noise,
                    GeneratorKind::synthetic_load}) {
    auto cfg = GeneratorConfig::defaults(kind);
    cfg.length = 300;
    cfg.seed = 3;
    const auto a = generate(cfg);
    const auto b = generate(cfg);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    cfg.seed = 4;
    const auto c = generate(cfg);
    CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
  }
}

TEST_CASE("generator validation") {
  auto bad = [](auto mutate, GeneratorKind kind) {
    auto cfg = GeneratorConfig::defaults(kind);
    mutate(cfg);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  };
  bad([](GeneratorConfig& c) { c.length = 0; }, GeneratorKind::sine_noise);
  bad([](GeneratorConfig& c) { c.noise = -1; }, GeneratorKind::sine_noise);
  bad([](GeneratorConfig& c) { c.noise_ar = 1.0; }, GeneratorKind::synthetic_load);
  bad([](GeneratorConfig& c) { c.period = 0; }, GeneratorKind::sine_noise);
  bad([](GeneratorConfig& c) { c.r = 4.5; }, GeneratorKind::logistic);
  bad([](GeneratorConfig& c) { c.dt = 0; }, GeneratorKind::mackey_glass);
  bad([](GeneratorConfig& c) { c.sample_every = 0.01; }, GeneratorKind::mackey_glass);
  bad([](GeneratorConfig& c) { c.weekly_amplitude = 1.0; }, GeneratorKind::synthetic_load);
}

TEST_CASE("lag correlation edge cases") {
  const std::vector<double> flat(10, 1.0);
  CHECK(lag_correlation(flat, 1) == 0.0);
  CHECK_THROWS_AS((void)lag_correlation(flat, 9), DataError);
  CHECK_THROWS_AS((void)lag_correlation(flat, 10), DataError);
}

TEST_CASE("csv parsing") {
  const auto s = parse_csv("1\n2\n3\n");
  CHECK(std::vector<double>(s.values().begin(), s.values().end()) == std::vector<double>{1, 2, 3});

  const auto h = parse_csv("load\n1.5\n\n-2e3\r\n");
  CHECK(h.name() == "load");
  CHECK(h.size() == 2);
  CHECK(h[1] == -2000.0);

  try {
    (void)parse_csv("1\nabc\n3\n");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS((void)parse_csv(""), DataError);
  CHECK_THROWS_AS((void)parse_csv("header\n"), DataError);
  CHECK_THROWS_AS((void)parse_csv("1\nnan\n"), DataError);
}

TEST_CASE("csv round trip is exact") {
  auto cfg = GeneratorConfig::defaults(GeneratorKind::mackey_glass);
  cfg.length = 1000;
  const auto s = generate(cfg);
  const auto dir = test::temp_dir("datasets");
  save_csv(s, dir / "mg.csv");
  const auto back = load_csv(dir / "mg.csv");
  CHECK(back.size() == 1000);
  CHECK(std::equal(s.values().begin(), s.values().end(), back.values().begin()));
  CHECK(back.name() == s.name());

  try {
    (void)load_csv(dir / "missing.csv");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("missing.csv") != std::string::npos);
  }
}

}  // TEST_SUITE
