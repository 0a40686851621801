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

#include "dvq/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dvq/report.hpp"

namespace dvq {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError("model: '" + path + "' must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError("model: missing field '" + (path.empty() ? "" : path + ".") + key + "'");
  }
  return *it;
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

std::uint64_t as_uint(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw SchemaError("model: field '" + path + "' must be a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError("model: field '" + path + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError("model: field '" + path + "' must be finite");
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const std::string& path) {
  if (!j.is_array() || j.size() != rows) {
    throw SchemaError("model: field '" + path + "' must be an array of " + std::to_string(rows) +
                      " rows");
  }
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string rpath = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != cols) {
      throw SchemaError("model: field '" + rpath + "' must hold " + std::to_string(cols) +
                        " numbers");
    }
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = as_double(j[i][c], rpath);
  }
  return m;
}

json codebook_to_json(const Codebook& cb, const SomConfig& cfg) {
  return json{{"k", cb.size()},
              {"p", cb.dim()},
              {"prototypes", matrix_to_json(cb.prototypes())},
              {"config", to_json(cfg)}};
}

std::pair<Codebook, SomConfig> codebook_from_json(const json& j, std::size_t p,
                                                  const std::string& path) {
  const auto k = static_cast<std::size_t>(as_uint(field(j, "k", path), join(path, "k")));
  const auto dim = static_cast<std::size_t>(as_uint(field(j, "p", path), join(path, "p")));
  if (k == 0) throw SchemaError("model: field '" + join(path, "k") + "' must be >= 1");
  if (dim != p) {
    throw SchemaError("model: field '" + join(path, "p") + "' is " + std::to_string(dim) +
                      " but the lag spec gives p = " + std::to_string(p));
  }
  Matrix protos = matrix_from_json(field(j, "prototypes", path), k, p, join(path, "prototypes"));
  SomConfig cfg = som_config_from_json(field(j, "config", path), join(path, "config"));
  return {Codebook(std::move(protos)), cfg};
}

}  // namespace

json to_json(const SomConfig& cfg) {
  return json{{"k", cfg.k},
              {"epochs", cfg.epochs},
              {"radius_start", cfg.start_radius()},
              {"radius_end", cfg.radius_end},
              {"kernel", "gaussian"},
              {"init", to_string(cfg.init)},
              {"seed", cfg.seed}};
}

SomConfig som_config_from_json(const json& j, const std::string& path) {
  SomConfig cfg;
  cfg.k = static_cast<std::size_t>(as_uint(field(j, "k", path), join(path, "k")));
  cfg.epochs = static_cast<std::size_t>(as_uint(field(j, "epochs", path), join(path, "epochs")));
  cfg.radius_start = as_double(field(j, "radius_start", path), join(path, "radius_start"));
  cfg.radius_end = as_double(field(j, "radius_end", path), join(path, "radius_end"));
  const json& kernel = field(j, "kernel", path);
  if (kernel != "gaussian") {
    throw SchemaError("model: field '" + join(path, "kernel") + "' must be \"gaussian\"");
  }
  const json& init = field(j, "init", path);
  if (!init.is_string()) throw SchemaError("model: field '" + join(path, "init") + "' must be a string");
  try {
    cfg.init = som_init_from_string(init.get<std::string>());
  } catch (const ConfigError& e) {
    throw SchemaError("model: field '" + join(path, "init") + "': " + e.what());
  }
  cfg.seed = as_uint(field(j, "seed", path), join(path, "seed"));
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw SchemaError("model: field '" + path + "': " + e.what());
  }
  return cfg;
}

json to_json(const DvqModel& model) {
  const auto& spec = model.spec();
  const auto& t = model.transition();
  json counts = json::array();
  for (std::size_t i = 0; i < t.n1(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < t.n2(); ++j) row.push_back(t.count(i, j));
    counts.push_back(std::move(row));
  }
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["spec"] = json{{"d", spec.d()},
                     {"offsets", std::vector<std::size_t>(spec.offsets().begin(),
                                                          spec.offsets().end())}};
  doc["norm"] = model.norm() ? json{{"mean", model.norm()->mean}, {"sd", model.norm()->sd}}
                             : json(nullptr);
  doc["reg_codebook"] = codebook_to_json(model.reg_codebook(), model.reg_config());
  doc["def_codebook"] = codebook_to_json(model.def_codebook(), model.def_config());
  doc["transition"] = json{{"counts", std::move(counts)},
                           {"rows", matrix_to_json(t.probabilities())}};
  doc["seed_of_fit"] = model.seed_of_fit();
  return doc;
}

DvqModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("model: document must be a JSON object");
  const auto version = as_uint(field(doc, "format_version", ""), "format_version");
  if (version != kModelFormatVersion) {
    throw SchemaError("model: field 'format_version' is " + std::to_string(version) +
                      ", expected " + std::to_string(kModelFormatVersion));
  }

  const json& spec_j = field(doc, "spec", "");
  const auto d = static_cast<std::size_t>(as_uint(field(spec_j, "d", "spec"), "spec.d"));
  const json& offs_j = field(spec_j, "offsets", "spec");
  if (!offs_j.is_array()) throw SchemaError("model: field 'spec.offsets' must be an array");
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < offs_j.size(); ++i) {
    offsets.push_back(static_cast<std::size_t>(
        as_uint(offs_j[i], "spec.offsets[" + std::to_string(i) + "]")));
  }
  LagSpec spec;
  try {
    spec = LagSpec(d, std::move(offsets));
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("model: field 'spec': ") + e.what());
  }

  std::optional<NormParams> norm;
  const json& norm_j = field(doc, "norm", "");
  if (!norm_j.is_null()) {
    NormParams params{as_double(field(norm_j, "mean", "norm"), "norm.mean"),
                      as_double(field(norm_j, "sd", "norm"), "norm.sd")};
    if (!(params.sd > 0.0)) throw SchemaError("model: field 'norm.sd' must be positive");
    norm = params;
  }

  auto [reg, reg_cfg] = codebook_from_json(field(doc, "reg_codebook", ""), spec.dim(), "reg_codebook");
  auto [def, def_cfg] = codebook_from_json(field(doc, "def_codebook", ""), spec.dim(), "def_codebook");
  const std::size_t n1 = reg.size();
  const std::size_t n2 = def.size();

  const json& trans_j = field(doc, "transition", "");
  const json& counts_j = field(trans_j, "counts", "transition");
  if (!counts_j.is_array() || counts_j.size() != n1) {
    throw SchemaError("model: field 'transition.counts' must have " + std::to_string(n1) + " rows");
  }
  std::vector<std::uint64_t> counts;
  counts.reserve(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i) {
    const std::string rpath = "transition.counts[" + std::to_string(i) + "]";
    if (!counts_j[i].is_array() || counts_j[i].size() != n2) {
      throw SchemaError("model: field '" + rpath + "' must hold " + std::to_string(n2) + " counts");
    }
    for (std::size_t j = 0; j < n2; ++j) counts.push_back(as_uint(counts_j[i][j], rpath));
  }
  auto transition = TransitionMatrix::from_counts(n1, n2, std::move(counts));
  // Stored rows must agree with the counts they were derived from.
  const Matrix rows = matrix_from_json(field(trans_j, "rows", "transition"), n1, n2, "transition.rows");
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      if (std::abs(rows(i, j) - transition.row(i)[j]) > 1e-12) {
        throw SchemaError("model: field 'transition.rows[" + std::to_string(i) +
                          "]' disagrees with transition.counts");
      }
    }
  }

  const auto seed = as_uint(field(doc, "seed_of_fit", ""), "seed_of_fit");
  try {
    return DvqModel(std::move(spec), norm, std::move(reg), std::move(def), reg_cfg, def_cfg,
                    std::move(transition), seed);
  } catch (const std::exception& e) {
    throw SchemaError(std::string("model: ") + e.what());
  }
}

std::string serialize_model(const DvqModel& model) { return to_json(model).dump(2) + "\n"; }

DvqModel parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("model: not valid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

void save_model(const DvqModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

DvqModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace dvq
