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

// Numerical stability diagnostics for a fitted model.
//
// A simulation is a Markov chain X_{t+1} = X_t + Y_t with Y_t drawn from the
// transition row of X_t's cluster. With the Lyapunov function g(x) = |x|^2
// the one-step drift from x in cluster i is
//
//     E|x + Y|^2 - |x|^2 = 2 x . E(Y | i) + E(|Y|^2 | i),
//
// and ergodicity follows (Foster) if this is negative far out in every
// unbounded cluster. These routines evaluate that drift along probe rays, and
// measure how simulations actually behave: boundedness against the training
// range and long-run cluster occupancy. Everything here is a diagnostic.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dvq/dvq.hpp"

namespace dvq {

struct ClusterExpectation {
  std::vector<double> mean_deformation;  // E(Y | i)
  double mean_squared_norm = 0.0;        // E(|Y|^2 | i)
};

/// Expectations over the effective transition row of every regressor cluster.
[[nodiscard]] std::vector<ClusterExpectation> cluster_expectations(const DvqModel& model);

/// Closed-form drift 2 x . E(Y | i) + E(|Y|^2 | i). Throws ConfigError on a
/// bad cluster index or dimension.
[[nodiscard]] double drift(const DvqModel& model, std::span<const double> x, std::size_t cluster);

/// Support-weighted mean of the regressor prototypes; stands in for the
/// training data mean when only the model is available.
[[nodiscard]] std::vector<double> model_centre(const DvqModel& model);

/// Clusters treated as unbounded: the two string ends plus every prototype on
/// the boundary of the codebook's convex hull. Exact (boundary-inclusive) when
/// the prototypes span at most 3 affine dimensions; above that a prototype is
/// flagged when it is the farthest codebook point along its own direction from
/// the centre.
[[nodiscard]] std::vector<bool> boundary_clusters(const DvqModel& model);

struct DriftProbe {
  double scale = 0.0;
  std::size_t cluster = 0;  // cluster of the probe point
  double drift = 0.0;
};

enum class DriftVerdict { pass, warn, interior };

struct ClusterDrift {
  std::size_t cluster = 0;
  bool boundary = false;
  bool supported = false;
  ClusterExpectation expectation;
  std::vector<DriftProbe> probes;
  DriftVerdict verdict = DriftVerdict::interior;
};

struct DriftReport {
  std::vector<double> centre;
  std::vector<double> scales;
  std::vector<ClusterDrift> clusters;
  std::size_t boundary_count = 0;
  std::size_t pass_count = 0;
  std::size_t warn_count = 0;

  [[nodiscard]] bool all_pass() const noexcept { return warn_count == 0; }
};

[[nodiscard]] std::string to_string(DriftVerdict v);

inline const std::vector<double> kDefaultProbeScales{2.0, 5.0, 10.0, 50.0};

/// For each boundary cluster i, probes x = c + s (proto_i - c) for every scale
/// s, finds the probe's cluster k and records the drift of g(x) = |x - c|^2,
/// i.e. drift(model, x - c, k). A boundary cluster PASSes when the drift at
/// the largest scale is strictly negative, else WARN. The probe ray stands in
/// for the interior of the cluster's unbounded cone.
[[nodiscard]] DriftReport check_negative_drift_assumption(
    const DvqModel& model, const std::vector<double>& scales = kDefaultProbeScales);

/// Fraction of values outside [lo - margin*(hi-lo), hi + margin*(hi-lo)]
/// (closed interval).
[[nodiscard]] double fraction_outside(std::span<const double> values, double lo, double hi,
                                      double margin) noexcept;

/// Boundedness of an ensemble against the range of the training series.
[[nodiscard]] double boundedness_check(const ForecastEnsemble& ens, const TimeSeries& training,
                                       double margin);

struct OccupancyStats {
  std::vector<double> frequency;  // per regressor cluster
  std::size_t steps = 0;
  double outside_fraction = 0.0;  // simulated values outside the training range +- margin
  double margin = 0.5;
};

/// One long simulation of `steps` transitions starting from the end of
/// `history`; records the cluster visited at every step. The training range
/// for `outside_fraction` is taken from `history`.
[[nodiscard]] OccupancyStats stationary_occupancy(const DvqModel& model,
                                                  std::span<const double> history,
                                                  std::size_t steps, std::uint64_t seed,
                                                  double margin = 0.5);

/// Half the L1 distance between two distributions of equal length.
[[nodiscard]] double total_variation(std::span<const double> a, std::span<const double> b);

[[nodiscard]] nlohmann::json to_json(const DriftReport& report);
[[nodiscard]] nlohmann::json to_json(const OccupancyStats& stats);

}  // namespace dvq
