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

#include <string>

#include "doctest.h"
#include "helpers.hpp"

#include "dvq/datasets.hpp"
#include "dvq/model_io.hpp"

using namespace dvq;
using nlohmann::json;

namespace {

DvqModel fitted_model(bool normalize) {
  auto cfg = GeneratorConfig::defaults(GeneratorKind::sine_noise);
  cfg.length = 600;
  cfg.seed = 9;
  const auto s = generate(cfg);
  SomConfig cx;
  cx.k = 6;
  cx.seed = 11;
  SomConfig cy;
  cy.k = 4;
  cy.seed = 12;
  cy.init = SomInit::pca_line;
  FitOptions opts;
  opts.normalize = normalize;
  return fit(s, LagSpec(1, {0, 1, 3}), cx, cy, opts).model;
}

std::string schema_message(const json& doc) {
  try {
    (void)model_from_json(doc);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("model_io") {

TEST_CASE("round trip is exact") {
  for (bool normalize : {false, true}) {
    const auto model = fitted_model(normalize);
    const auto text = serialize_model(model);
    const auto back = parse_model(text);
    CHECK(back == model);
    CHECK(serialize_model(back) == text);
  }
}

TEST_CASE("serialized document layout") {
  const auto doc = to_json(fitted_model(true));
  CHECK(doc["format_version"] == kModelFormatVersion);
  CHECK(doc["spec"]["offsets"] == json::array({0, 1, 3}));
  CHECK(doc["norm"].is_object());
  CHECK(doc["reg_codebook"]["k"] == 6);
  CHECK(doc["def_codebook"]["config"]["init"] == "pca_line");
  CHECK(doc["transition"]["counts"].size() == 6);
  CHECK(doc["transition"]["rows"][0].size() == 4);
  CHECK(doc["seed_of_fit"] == 11);
  CHECK(to_json(fitted_model(false))["norm"].is_null());
}

TEST_CASE("schema errors name the field") {
  const auto good = to_json(fitted_model(false));

  auto doc = good;
  doc.erase("transition");
  CHECK(schema_message(doc).find("transition") != std::string::npos);

  doc = good;
  doc["format_version"] = 2;
  CHECK(schema_message(doc).find("format_version") != std::string::npos);

  doc = good;
  doc["transition"]["rows"][2][1] = 0.123456;
  CHECK(schema_message(doc).find("transition.rows[2]") != std::string::npos);

  doc = good;
  doc["transition"]["counts"][1] = json::array({1, 2});
  CHECK(schema_message(doc).find("transition.counts[1]") != std::string::npos);

  doc = good;
  doc["reg_codebook"]["prototypes"][0][0] = "x";
  CHECK(schema_message(doc).find("reg_codebook.prototypes") != std::string::npos);

  doc = good;
  doc["def_codebook"]["p"] = 5;
  CHECK(schema_message(doc).find("def_codebook.p") != std::string::npos);

  doc = good;
  doc["norm"] = json{{"mean", 0.0}, {"sd", 0.0}};
  CHECK(schema_message(doc).find("norm.sd") != std::string::npos);

  doc = good;
  doc["spec"]["offsets"] = json::array({1, 0});
  CHECK(schema_message(doc).find("spec") != std::string::npos);

  doc = good;
  for (auto& row : doc["transition"]["counts"]) {
    for (auto& c : row) c = 0;
  }
  for (auto& row : doc["transition"]["rows"]) {
    for (auto& c : row) c = 0.0;
  }
  CHECK_FALSE(schema_message(doc).empty());

  CHECK_THROWS_AS((void)parse_model("{not json"), SchemaError);
  CHECK_THROWS_AS((void)parse_model("[]"), SchemaError);
}

TEST_CASE("file round trip and missing file") {
  const auto dir = test::temp_dir("model_io");
  const auto model = fitted_model(false);
  save_model(model, dir / "sub" / "model.json");
  CHECK(load_model(dir / "sub" / "model.json") == model);
  CHECK_THROWS_AS((void)load_model(dir / "absent.json"), DataError);
}

}  // TEST_SUITE
