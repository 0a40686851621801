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

#include "dvq/stability.hpp"

#include <algorithm>
#include <cmath>

#include "dvq/kernels.hpp"

namespace dvq {

std::vector<ClusterExpectation> cluster_expectations(const DvqModel& model) {
  const auto& defs = model.def_codebook();
  const std::size_t p = defs.dim();
  std::vector<ClusterExpectation> out(model.reg_codebook().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto row = model.transition().row(model.effective_row(i));
    auto& e = out[i];
    e.mean_deformation.assign(p, 0.0);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] == 0.0) continue;
      const auto y = defs[j];
      for (std::size_t c = 0; c < p; ++c) e.mean_deformation[c] += row[j] * y[c];
      e.mean_squared_norm += row[j] * dot(y, y);
    }
  }
  return out;
}

namespace {
double drift_from(const ClusterExpectation& e, std::span<const double> x) {
  return 2.0 * dot(x, e.mean_deformation) + e.mean_squared_norm;
}
}  // namespace

double drift(const DvqModel& model, std::span<const double> x, std::size_t cluster) {
  if (cluster >= model.reg_codebook().size()) {
    throw ConfigError("drift: cluster " + std::to_string(cluster) + " out of range");
  }
  if (x.size() != model.spec().dim()) throw ConfigError("drift: dimension mismatch");
  const std::size_t row = model.effective_row(cluster);
  if (!model.transition().supported(row)) {
    throw DataError("drift: cluster " + std::to_string(cluster) + " has no supported row");
  }
  // Only the one row is needed; avoid computing every cluster.
  ClusterExpectation e;
  const auto probs = model.transition().row(row);
  e.mean_deformation.assign(x.size(), 0.0);
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] == 0.0) continue;
    const auto y = model.def_codebook()[j];
    for (std::size_t c = 0; c < x.size(); ++c) e.mean_deformation[c] += probs[j] * y[c];
    e.mean_squared_norm += probs[j] * dot(y, y);
  }
  return drift_from(e, x);
}

std::vector<double> model_centre(const DvqModel& model) {
  const auto& reg = model.reg_codebook();
  std::vector<double> centre(reg.dim(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    const auto w = static_cast<double>(model.transition().support(i));
    if (w == 0.0) continue;
    total += w;
    for (std::size_t c = 0; c < reg.dim(); ++c) centre[c] += w * reg[i][c];
  }
  for (double& v : centre) v /= total;
  return centre;
}

namespace {

// Coordinates of the points in an orthonormal basis of their affine hull.
struct AffineFrame {
  std::size_t rank = 0;
  std::vector<std::vector<double>> coords;  // n x rank
  double scale = 0.0;
};

AffineFrame affine_frame(const Matrix& pts) {
  const std::size_t n = pts.rows();
  const std::size_t p = pts.cols();
  std::vector<double> mean(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < p; ++c) mean[c] += pts(i, c) / static_cast<double>(n);
  }
  std::vector<std::vector<double>> centred(n, std::vector<double>(p));
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < p; ++c) centred[i][c] = pts(i, c) - mean[c];
    scale = std::max(scale, std::sqrt(dot(centred[i], centred[i])));
  }
  std::vector<std::vector<double>> basis;
  const double tol = 1e-9 * std::max(scale, 1e-300);
  for (std::size_t i = 0; i < n && basis.size() < p; ++i) {
    std::vector<double> v = centred[i];
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double proj = dot(v, b);
        for (std::size_t c = 0; c < p; ++c) v[c] -= proj * b[c];
      }
    }
    const double norm = std::sqrt(dot(v, v));
    if (norm > tol) {
      for (double& x : v) x /= norm;
      basis.push_back(std::move(v));
    }
  }
  AffineFrame frame;
  frame.rank = basis.size();
  frame.scale = scale;
  frame.coords.assign(n, std::vector<double>(frame.rank));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < frame.rank; ++r) frame.coords[i][r] = dot(centred[i], basis[r]);
  }
  return frame;
}

bool all_one_side(const std::vector<double>& side, double tol) {
  bool nonneg = true;
  bool nonpos = true;
  for (double s : side) {
    if (s < -tol) nonneg = false;
    if (s > tol) nonpos = false;
  }
  return nonneg || nonpos;
}

std::vector<bool> hull_boundary_low_rank(const AffineFrame& f) {
  const std::size_t n = f.coords.size();
  const auto& q = f.coords;
  std::vector<bool> on(n, false);
  const double s = std::max(f.scale, 1e-300);
  if (f.rank == 0) return std::vector<bool>(n, true);
  if (f.rank == 1) {
    double lo = q[0][0];
    double hi = q[0][0];
    for (const auto& v : q) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      on[i] = q[i][0] <= lo + 1e-12 * s || q[i][0] >= hi - 1e-12 * s;
    }
    return on;
  }
  std::vector<double> side(n);
  if (f.rank == 2) {
    const double tol = 1e-12 * s * s;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n && !on[i]; ++j) {
        const double ex = q[j][0] - q[i][0];
        const double ey = q[j][1] - q[i][1];
        if (std::hypot(ex, ey) <= 1e-12 * s) continue;
        for (std::size_t k = 0; k < n; ++k) {
          side[k] = ex * (q[k][1] - q[i][1]) - ey * (q[k][0] - q[i][0]);
        }
        on[i] = all_one_side(side, tol);
      }
    }
    return on;
  }
  // rank 3: a supporting plane through i and two other points.
  const double tol = 1e-12 * s * s * s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n && !on[i]; ++j) {
      for (std::size_t k = j + 1; k < n && !on[i]; ++k) {
        const double a[3] = {q[j][0] - q[i][0], q[j][1] - q[i][1], q[j][2] - q[i][2]};
        const double b[3] = {q[k][0] - q[i][0], q[k][1] - q[i][1], q[k][2] - q[i][2]};
        const double nrm[3] = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                               a[0] * b[1] - a[1] * b[0]};
        if (std::sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]) <= 1e-12 * s * s) {
          continue;
        }
        for (std::size_t l = 0; l < n; ++l) {
          side[l] = nrm[0] * (q[l][0] - q[i][0]) + nrm[1] * (q[l][1] - q[i][1]) +
                    nrm[2] * (q[l][2] - q[i][2]);
        }
        on[i] = all_one_side(side, tol);
      }
    }
  }
  return on;
}

std::vector<bool> extreme_along_own_direction(const Matrix& pts) {
  const std::size_t n = pts.rows();
  const std::size_t p = pts.cols();
  std::vector<double> mean(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < p; ++c) mean[c] += pts(i, c) / static_cast<double>(n);
  }
  std::vector<std::vector<double>> centred(n, std::vector<double>(p));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < p; ++c) centred[i][c] = pts(i, c) - mean[c];
  }
  std::vector<bool> on(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double own = dot(centred[i], centred[i]);
    if (own == 0.0) continue;
    bool extreme = true;
    for (std::size_t j = 0; j < n && extreme; ++j) {
      if (j != i && dot(centred[j], centred[i]) > own * (1.0 + 1e-12)) extreme = false;
    }
    on[i] = extreme;
  }
  return on;
}

}  // namespace

std::vector<bool> boundary_clusters(const DvqModel& model) {
  const Matrix& pts = model.reg_codebook().prototypes();
  const std::size_t n = pts.rows();
  const AffineFrame frame = affine_frame(pts);
  std::vector<bool> flags =
      frame.rank <= 3 ? hull_boundary_low_rank(frame) : extreme_along_own_direction(pts);
  flags[0] = true;
  flags[n - 1] = true;
  return flags;
}

std::string to_string(DriftVerdict v) {
  switch (v) {
    case DriftVerdict::pass:
      return "PASS";
    case DriftVerdict::warn:
      return "WARN";
    case DriftVerdict::interior:
      break;
  }
  return "interior";
}

DriftReport check_negative_drift_assumption(const DvqModel& model,
                                            const std::vector<double>& scales) {
  if (scales.empty()) throw ConfigError("drift check: at least one probe scale is required");
  const auto& reg = model.reg_codebook();
  const std::size_t p = reg.dim();
  const auto expectations = cluster_expectations(model);
  const auto flags = boundary_clusters(model);

  DriftReport report;
  report.centre = model_centre(model);
  report.scales = scales;
  const double largest = *std::max_element(scales.begin(), scales.end());
  std::vector<double> probe(p);
  std::vector<double> offset(p);
  for (std::size_t i = 0; i < reg.size(); ++i) {
    ClusterDrift cd;
    cd.cluster = i;
    cd.boundary = flags[i];
    cd.supported = model.transition().supported(i);
    cd.expectation = expectations[i];
    double drift_at_largest = 0.0;
    for (double s : scales) {
      for (std::size_t c = 0; c < p; ++c) {
        offset[c] = s * (reg[i][c] - report.centre[c]);
        probe[c] = report.centre[c] + offset[c];
      }
      const std::size_t k = kernels::nearest(reg.prototypes(), probe);
      const double value = drift_from(expectations[k], offset);
      cd.probes.push_back({s, k, value});
      if (s == largest) drift_at_largest = value;
    }
    if (cd.boundary) {
      ++report.boundary_count;
      cd.verdict = drift_at_largest < 0.0 ? DriftVerdict::pass : DriftVerdict::warn;
      if (cd.verdict == DriftVerdict::pass) {
        ++report.pass_count;
      } else {
        ++report.warn_count;
      }
    }
    report.clusters.push_back(std::move(cd));
  }
  return report;
}

double fraction_outside(std::span<const double> values, double lo, double hi,
                        double margin) noexcept {
  if (values.empty()) return 0.0;
  const double width = hi - lo;
  const double low = lo - margin * width;
  const double high = hi + margin * width;
  std::size_t outside = 0;
  for (double v : values) {
    if (v < low || v > high) ++outside;
  }
  return static_cast<double>(outside) / static_cast<double>(values.size());
}

double boundedness_check(const ForecastEnsemble& ens, const TimeSeries& training, double margin) {
  if (ens.paths.rows() == 0) throw DataError("boundedness_check: empty ensemble");
  const auto [lo, hi] = std::minmax_element(training.values().begin(), training.values().end());
  return fraction_outside(ens.paths.flat(), *lo, *hi, margin);
}

OccupancyStats stationary_occupancy(const DvqModel& model, std::span<const double> history,
                                    std::size_t steps, std::uint64_t seed, double margin) {
  if (steps == 0) throw ConfigError("stationary_occupancy: steps must be >= 1");
  if (history.empty()) throw DataError("stationary_occupancy: empty history");
  std::vector<std::size_t> visits(model.reg_codebook().size(), 0);
  Rng rng(seed);
  const auto values = simulate_path(model, history, steps, rng,
                                    [&](const SimulationStep& s) { ++visits[s.cluster]; });
  OccupancyStats stats;
  stats.steps = steps;
  stats.margin = margin;
  stats.frequency.resize(visits.size());
  for (std::size_t i = 0; i < visits.size(); ++i) {
    stats.frequency[i] = static_cast<double>(visits[i]) / static_cast<double>(steps);
  }
  const auto [lo, hi] = std::minmax_element(history.begin(), history.end());
  stats.outside_fraction = fraction_outside(values, *lo, *hi, margin);
  return stats;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("total_variation: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return 0.5 * acc;
}

nlohmann::json to_json(const DriftReport& report) {
  using nlohmann::json;
  json clusters = json::array();
  for (const auto& cd : report.clusters) {
    json probes = json::array();
    for (const auto& pr : cd.probes) {
      probes.push_back({{"scale", pr.scale}, {"cluster", pr.cluster}, {"drift", pr.drift}});
    }
    clusters.push_back({{"cluster", cd.cluster},
                        {"boundary", cd.boundary},
                        {"supported", cd.supported},
                        {"expected_deformation", cd.expectation.mean_deformation},
                        {"expected_squared_norm", cd.expectation.mean_squared_norm},
                        {"probes", std::move(probes)},
                        {"verdict", to_string(cd.verdict)}});
  }
  return json{{"lyapunov", "|x - centre|^2"},
              {"probe_direction", "ray from the support-weighted prototype centre through the "
                                  "cluster prototype (heuristic)"},
              {"centre", report.centre},
              {"scales", report.scales},
              {"boundary_clusters", report.boundary_count},
              {"pass", report.pass_count},
              {"warn", report.warn_count},
              {"clusters", std::move(clusters)}};
}

nlohmann::json to_json(const OccupancyStats& stats) {
  return nlohmann::json{{"steps", stats.steps},
                        {"frequency", stats.frequency},
                        {"outside_fraction", stats.outside_fraction},
                        {"margin", stats.margin}};
}

}  // namespace dvq
