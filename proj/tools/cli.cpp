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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dvq/datasets.hpp"
#include "dvq/dvq.hpp"
#include "dvq/model_io.hpp"
#include "dvq/report.hpp"
#include "dvq/rng.hpp"
#include "dvq/selection.hpp"
#include "dvq/stability.hpp"
#include "run_config.hpp"

namespace dvq::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flag values for one subcommand; each setter copies a flag into the
// RunConfig only when the flag was actually given.
struct Overrides {
  std::string config_path;
  std::vector<std::function<void(RunConfig&)>> setters;

  template <typename T, typename Apply>
  CLI::Option* flag(CLI::App* app, const std::string& name, const std::string& help,
                    Apply apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, help);
    setters.push_back([opt, value, apply](RunConfig& cfg) {
      if (opt->count() > 0) apply(cfg, *value);
    });
    return opt;
  }

  void apply(RunConfig& cfg) const {
    for (const auto& s : setters) s(cfg);
  }
};

GeneratorConfig& require_generator(RunConfig& cfg, const char* flag) {
  if (!cfg.generator) {
    throw ConfigError(std::string(flag) + " needs a generator (use --generator)");
  }
  return *cfg.generator;
}

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "JSON run configuration; flags override it");
  o.flag<std::uint64_t>(app, "--seed", "master seed",
                        [](RunConfig& c, std::uint64_t v) { c.seed = v; });
  o.flag<int>(app, "--jobs", "worker threads (0 = all cores)",
              [](RunConfig& c, int v) { c.jobs = v; });
  o.flag<std::string>(app, "--out-dir", "output directory",
                      [](RunConfig& c, const std::string& v) { c.out_dir = v; });
}

void add_input(CLI::App* app, Overrides& o) {
  o.flag<std::string>(app, "--input", "CSV input series",
                      [](RunConfig& c, const std::string& v) {
                        c.input_file = v;
                        c.generator.reset();
                      });
  // Order matters: the kind resets the generator before its parameters apply.
  o.flag<std::string>(app, "--generator",
                      "synthetic input: mackey_glass, logistic, sine_noise, synthetic_load",
                      [](RunConfig& c, const std::string& v) {
                        const auto kind = generator_kind_from_string(v);
                        if (!c.generator || c.generator->kind != kind) {
                          c.generator = GeneratorConfig::defaults(kind);
                        }
                        c.input_file.reset();
                      });
  o.flag<std::size_t>(app, "--length", "generated series length",
                      [](RunConfig& c, std::size_t v) { require_generator(c, "--length").length = v; });
  o.flag<double>(app, "--noise", "generator observation noise sd",
                 [](RunConfig& c, double v) { require_generator(c, "--noise").noise = v; });
  o.flag<double>(app, "--noise-ar", "lag-one autocorrelation of the generator noise",
                 [](RunConfig& c, double v) { require_generator(c, "--noise-ar").noise_ar = v; });
  o.flag<std::uint64_t>(app, "--gen-seed", "generator seed",
                        [](RunConfig& c, std::uint64_t v) { require_generator(c, "--gen-seed").seed = v; });
  o.flag<std::string>(app, "--split", "learning,validation,test lengths in blocks of d values",
                      [](RunConfig& c, const std::string& v) {
                        const auto parts = parse_offsets(v);
                        if (parts.size() != 3) throw ConfigError("--split expects three counts");
                        c.split = {parts[0], parts[1], parts[2]};
                      });
}

void add_lag(CLI::App* app, Overrides& o) {
  o.flag<std::size_t>(app, "--d", "block size (values per forecast step)",
                      [](RunConfig& c, std::size_t v) { c.d = v; });
  o.flag<std::string>(app, "--offsets", "block offsets, e.g. 0,1,2,6,7",
                      [](RunConfig& c, const std::string& v) { c.offsets = parse_offsets(v); });
  o.flag<std::size_t>(app, "--p", "contiguous lags 0..p-1 (scalar series)",
                      [](RunConfig& c, std::size_t v) {
                        if (v == 0) throw ConfigError("--p must be >= 1");
                        const auto spec = LagSpec::contiguous(v);
                        c.offsets.assign(spec.offsets().begin(), spec.offsets().end());
                      });
}

void add_som(CLI::App* app, Overrides& o, bool with_sizes) {
  if (with_sizes) {
    o.flag<std::size_t>(app, "--n1", "regressor prototypes",
                        [](RunConfig& c, std::size_t v) { c.n1 = v; });
    o.flag<std::size_t>(app, "--n2", "deformation prototypes",
                        [](RunConfig& c, std::size_t v) { c.n2 = v; });
  }
  o.flag<std::size_t>(app, "--epochs", "SOM batch epochs",
                      [](RunConfig& c, std::size_t v) { c.som.epochs = v; });
  o.flag<double>(app, "--radius-start", "initial neighbourhood radius (default k/4)",
                 [](RunConfig& c, double v) { c.som.radius_start = v; });
  o.flag<double>(app, "--radius-end", "final neighbourhood radius",
                 [](RunConfig& c, double v) { c.som.radius_end = v; });
  o.flag<std::string>(app, "--init", "SOM initialization: sample or pca_line",
                      [](RunConfig& c, const std::string& v) { c.som.init = som_init_from_string(v); });
  o.flag<bool>(app, "--normalize", "z-score the series before fitting",
               [](RunConfig& c, bool v) { c.normalize = v; });
}

void add_model(CLI::App* app, Overrides& o) {
  o.flag<std::string>(app, "--model", "model file (default <out-dir>/model.json)",
                      [](RunConfig& c, const std::string& v) { c.model_path = v; });
}

// ---------------------------------------------------------------------------

struct Segments {
  TimeSeries training;  // learning ++ validation, or the whole series
  std::optional<TimeSeries> learning;
  std::optional<TimeSeries> validation;
  std::optional<TimeSeries> test;
};

TimeSeries load_input(const RunConfig& cfg) {
  if (cfg.input_file) return load_csv(*cfg.input_file);
  if (cfg.generator) return generate(*cfg.generator);
  throw ConfigError("no input series: give --input FILE or --generator KIND");
}

Segments segment(const RunConfig& cfg, const TimeSeries& series, std::size_t d) {
  if (!cfg.split.enabled()) return {series, std::nullopt, std::nullopt, std::nullopt};
  auto s = split_by_counts(series, cfg.split.learning, cfg.split.validation, cfg.split.test, d);
  Segments out{concat(s.learning, s.validation), s.learning, s.validation, s.test};
  return out;
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
  return fs::path(cfg.out_dir) / name;
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

void write_run_config(const RunConfig& cfg, const std::string& command) {
  json j = to_json(cfg);
  j["command"] = command;
  write_json(out_path(cfg, "run_config_" + command + ".json"), j);
}

json fit_report_json(const DvqModel& model, const FitReport& r) {
  double worst = 0.0;
  for (std::size_t i = 0; i < model.transition().n1(); ++i) {
    if (!model.transition().supported(i)) continue;
    double s = 0.0;
    for (double p : model.transition().row(i)) s += p;
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return {{"n1", model.reg_codebook().size()},
          {"n2", model.def_codebook().size()},
          {"regressors", r.regressors},
          {"deformations", r.deformations},
          {"reg_quantization_error", r.reg_quantization_error},
          {"def_quantization_error", r.def_quantization_error},
          {"reg_occupancy", r.reg_occupancy},
          {"def_occupancy", r.def_occupancy},
          {"reg_dead_units", r.reg_dead_units},
          {"def_dead_units", r.def_dead_units},
          {"empty_rows", r.empty_rows},
          {"max_row_sum_error", worst},
          {"warnings", r.warnings}};
}

std::string fixed(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

DvqModel load_model_for(const RunConfig& cfg) {
  return load_model(cfg.model_path ? fs::path(*cfg.model_path) : out_path(cfg, "model.json"));
}

// ---------------------------------------------------------------------------

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.generator) throw ConfigError("generate needs --generator KIND");
  const auto series = generate(*cfg.generator);
  const auto path = out_path(cfg, "series.csv");
  save_csv(series, path);
  write_run_config(cfg, "generate");
  out << "wrote " << series.size() << " values of " << to_string(cfg.generator->kind) << " to "
      << path.string() << "\n";
  return kOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const auto series = load_input(cfg);
  const auto spec = cfg.lag_spec();
  const auto seg = segment(cfg, series, spec.d());
  const auto seeds = cell_seeds(cfg.seed, cfg.n1, cfg.n2);
  FitOptions opts;
  opts.normalize = cfg.normalize;
  opts.jobs = cfg.jobs;
  const auto result = fit(seg.training, spec, som_config_for(cfg.som, cfg.n1, seeds.reg),
                          som_config_for(cfg.som, cfg.n2, seeds.def), opts);
  save_model(result.model, out_path(cfg, "model.json"));
  write_json(out_path(cfg, "fit_report.json"), fit_report_json(result.model, result.report));
  write_run_config(cfg, "fit");
  const auto& r = result.report;
  out << "fitted n1=" << cfg.n1 << " n2=" << cfg.n2 << " on " << seg.training.size()
      << " values (" << r.regressors << " regressors)\n"
      << "quantization error: regressor " << fixed(r.reg_quantization_error) << ", deformation "
      << fixed(r.def_quantization_error) << "\n"
      << "dead units: " << r.reg_dead_units << " / " << r.def_dead_units
      << ", empty transition rows: " << r.empty_rows << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto series = load_input(cfg);
  const auto spec = cfg.lag_spec();
  if (!cfg.split.enabled()) throw ConfigError("sweep needs --split learning,validation,test");
  const auto seg = segment(cfg, series, spec.d());
  FitOptions opts;
  opts.normalize = cfg.normalize;
  opts.jobs = cfg.jobs;
  const auto grid = cfg.grid();
  const auto result = sweep(*seg.learning, *seg.validation, spec, grid, cfg.som, cfg.seed, opts,
                            [&err](const SweepCell& c, std::size_t done, std::size_t total) {
                              err << "[" << done << "/" << total << "] n1=" << c.n1
                                  << " n2=" << c.n2 << " sse=" << format_number(c.sse)
                                  << (c.ok ? "" : " (" + c.status + ")") << "\n";
                            });
  write_file_atomic(out_path(cfg, "sweep.csv"), sweep_csv(result));
  write_file_atomic(out_path(cfg, "sweep.svg"), sweep_heatmap_svg(result));
  const auto best = refit_best(*seg.learning, *seg.validation, spec, result.best_n1,
                               result.best_n2, cfg.som, cfg.seed, opts);
  save_model(best.model, out_path(cfg, "model.json"));
  write_json(out_path(cfg, "fit_report.json"), fit_report_json(best.model, best.report));
  write_run_config(cfg, "sweep");
  std::size_t failed = 0;
  for (const auto& c : result.cells) failed += c.ok ? 0 : 1;
  out << "swept " << result.cells.size() << " cells (" << failed << " failed)\n"
      << "best n1=" << result.best_n1 << " n2=" << result.best_n2
      << " validation SSE=" << format_number(result.best_sse) << "\n"
      << "refit on learning+validation written to " << out_path(cfg, "model.json").string() << "\n";
  return kOk;
}

int cmd_forecast(const RunConfig& cfg, std::ostream& out) {
  const auto model = load_model_for(cfg);
  const auto series = load_input(cfg);
  const std::size_t d = model.spec().d();
  const auto seg = segment(cfg, series, d);
  const auto ens = monte_carlo(model, seg.training.values(), cfg.horizon, cfg.paths, cfg.seed, cfg.jobs);
  const auto summary = summarize(ens, cfg.lower, cfg.upper, cfg.jobs);

  std::span<const double> truth;
  if (seg.test) {
    truth = seg.test->values().first(std::min(seg.test->size(), summary.size()));
  }
  write_file_atomic(out_path(cfg, "ensemble.csv"), ensemble_csv(ens));
  write_file_atomic(out_path(cfg, "summary.csv"), summary_csv(summary, truth));

  const auto hist = seg.training.values();
  const std::size_t tail = std::min(hist.size(), std::max<std::size_t>(100, summary.size()));
  TrendPlot plot;
  plot.title = "forecast: " + std::to_string(cfg.paths) + " paths, horizon " +
               std::to_string(cfg.horizon) + (d > 1 ? " blocks" : " steps");
  plot.history = hist.last(tail);
  plot.summary = &summary;
  plot.truth = truth;
  write_file_atomic(out_path(cfg, "forecast.svg"), trend_svg(plot));
  write_run_config(cfg, "forecast");

  double width = 0.0;
  for (std::size_t i = 0; i < summary.size(); ++i) width += summary.upper[i] - summary.lower[i];
  out << "simulated " << ens.size() << " paths x " << summary.size() << " values\n"
      << "mean band width " << fixed(width / static_cast<double>(summary.size())) << "\n";
  if (!truth.empty()) {
    std::size_t inside = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      inside += (truth[i] >= summary.lower[i] && truth[i] <= summary.upper[i]) ? 1 : 0;
    }
    out << "test SSE of mean path " << fixed(sse(std::span(summary.mean).first(truth.size()), truth))
        << ", band coverage " << inside << "/" << truth.size() << "\n";
  }
  return kOk;
}

int cmd_stability(const RunConfig& cfg, std::ostream& out) {
  const auto model = load_model_for(cfg);
  const auto series = load_input(cfg);
  const auto seg = segment(cfg, series, model.spec().d());
  const auto& st = cfg.stability;

  const auto drift_report = check_negative_drift_assumption(model, st.scales);
  const auto ens = monte_carlo(model, seg.training.values(), st.horizon, st.paths,
                               derive_seed(cfg.seed, {1}), cfg.jobs);
  const double outside = boundedness_check(ens, seg.training, st.margin);
  const auto occupancy =
      stationary_occupancy(model, seg.training.values(), st.steps, derive_seed(cfg.seed, {2}), st.margin);

  const auto [lo_it, hi_it] = std::minmax_element(seg.training.values().begin(), seg.training.values().end());
  const json drift_json = to_json(drift_report);
  const json occ_json = to_json(occupancy);
  const json bounded_json = {{"paths", st.paths},
                             {"horizon", st.horizon},
                             {"margin", st.margin},
                             {"training_min", *lo_it},
                             {"training_max", *hi_it},
                             {"fraction_outside", outside}};
  write_json(out_path(cfg, "drift.json"), drift_json);
  write_json(out_path(cfg, "occupancy.json"), occ_json);
  write_json(out_path(cfg, "stability.json"),
             {{"drift", drift_json}, {"boundedness", bounded_json}, {"occupancy", occ_json}});
  write_run_config(cfg, "stability");

  out << "negative-drift check (" << drift_report.boundary_count << " boundary clusters)\n";
  out << "cluster  boundary  verdict ";
  for (double s : drift_report.scales) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "  s=%-9s", fixed(s, 3).c_str());
    out << buf;
  }
  out << "\n";
  for (const auto& c : drift_report.clusters) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%7zu  %8s  %-8s", c.cluster, c.boundary ? "yes" : "no",
                  to_string(c.verdict).c_str());
    out << buf;
    for (const auto& p : c.probes) {
      std::snprintf(buf, sizeof buf, "  %+11.4g", p.drift);
      out << buf;
    }
    out << "\n";
  }
  out << "PASS " << drift_report.pass_count << ", WARN " << drift_report.warn_count << "\n";
  out << "boundedness: " << fixed(100.0 * outside) << "% of " << st.paths << "x" << st.horizon
      << " simulated values outside the training range +- " << st.margin << " x range\n";
  out << "occupancy over " << occupancy.steps << " steps: " << fixed(100.0 * occupancy.outside_fraction)
      << "% outside range\n";
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Double vector quantization for long-term trend forecasting", "dvq"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  Overrides gen_o, fit_o, sweep_o, fc_o, st_o;
  auto* gen = app.add_subcommand("generate", "write a synthetic series to <out-dir>/series.csv");
  add_common(gen, gen_o);
  add_input(gen, gen_o);

  auto* fitc = app.add_subcommand("fit", "fit one model; writes model.json and fit_report.json");
  add_common(fitc, fit_o);
  add_input(fitc, fit_o);
  add_lag(fitc, fit_o);
  add_som(fitc, fit_o, true);

  auto* sw = app.add_subcommand("sweep", "grid search over (n1, n2); writes sweep.csv, sweep.svg, model.json");
  add_common(sw, sweep_o);
  add_input(sw, sweep_o);
  add_lag(sw, sweep_o);
  add_som(sw, sweep_o, false);
  sweep_o.flag<std::string>(sw, "--grid-n1", "n1 axis: lo:hi:step or a comma list",
                            [](RunConfig& c, const std::string& v) { c.grid_n1 = v; });
  sweep_o.flag<std::string>(sw, "--grid-n2", "n2 axis: lo:hi:step or a comma list",
                            [](RunConfig& c, const std::string& v) { c.grid_n2 = v; });
  sweep_o.flag<std::size_t>(sw, "--val-horizon", "validation horizon in steps (0 = whole segment)",
                            [](RunConfig& c, std::size_t v) { c.validation_horizon = v; });
  sweep_o.flag<std::size_t>(sw, "--val-paths", "simulations per validation score",
                            [](RunConfig& c, std::size_t v) { c.validation_paths = v; });

  auto* fc = app.add_subcommand("forecast", "Monte-Carlo forecast; writes ensemble.csv, summary.csv, forecast.svg");
  add_common(fc, fc_o);
  add_input(fc, fc_o);
  add_model(fc, fc_o);
  fc_o.flag<std::size_t>(fc, "--horizon", "forecast horizon in steps",
                         [](RunConfig& c, std::size_t v) { c.horizon = v; });
  fc_o.flag<std::size_t>(fc, "--paths", "number of simulated paths",
                         [](RunConfig& c, std::size_t v) { c.paths = v; });
  fc_o.flag<double>(fc, "--lower", "lower quantile level",
                    [](RunConfig& c, double v) { c.lower = v; });
  fc_o.flag<double>(fc, "--upper", "upper quantile level",
                    [](RunConfig& c, double v) { c.upper = v; });

  auto* stc = app.add_subcommand("stability", "drift, boundedness and occupancy diagnostics");
  add_common(stc, st_o);
  add_input(stc, st_o);
  add_model(stc, st_o);
  st_o.flag<std::string>(stc, "--scales", "probe scales, comma separated",
                         [](RunConfig& c, const std::string& v) {
                           c.stability.scales.clear();
                           std::string_view rest = v;
                           for (;;) {
                             const auto pos = rest.find(',');
                             const std::string item(rest.substr(0, pos));
                             try {
                               std::size_t used = 0;
                               c.stability.scales.push_back(std::stod(item, &used));
                               if (used != item.size()) throw std::invalid_argument(item);
                             } catch (const std::exception&) {
                               throw ConfigError("invalid --scales '" + v + "'");
                             }
                             if (pos == std::string_view::npos) break;
                             rest.remove_prefix(pos + 1);
                           }
                         });
  st_o.flag<double>(stc, "--margin", "boundedness margin as a fraction of the training range",
                    [](RunConfig& c, double v) { c.stability.margin = v; });
  st_o.flag<std::size_t>(stc, "--steps", "occupancy simulation length",
                         [](RunConfig& c, std::size_t v) { c.stability.steps = v; });
  st_o.flag<std::size_t>(stc, "--paths", "boundedness ensemble size",
                         [](RunConfig& c, std::size_t v) { c.stability.paths = v; });
  st_o.flag<std::size_t>(stc, "--horizon", "boundedness horizon in steps",
                         [](RunConfig& c, std::size_t v) { c.stability.horizon = v; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "dvq: " << e.what() << "\n";
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << sub->help();
    } else {
      err << app.help();
    }
    return kUsage;
  }

  struct Route {
    CLI::App* app;
    Overrides* overrides;
  };
  const Route routes[] = {{gen, &gen_o}, {fitc, &fit_o}, {sw, &sweep_o}, {fc, &fc_o}, {stc, &st_o}};
  const Route* route = nullptr;
  for (const auto& r : routes) {
    if (r.app->parsed()) route = &r;
  }
  const std::string name = route->app->get_name();

  try {
    RunConfig cfg = route->overrides->config_path.empty()
                        ? RunConfig{}
                        : load_run_config(route->overrides->config_path);
    route->overrides->apply(cfg);
    cfg.validate();
    if (name == "generate") return cmd_generate(cfg, out);
    if (name == "fit") return cmd_fit(cfg, out);
    if (name == "sweep") return cmd_sweep(cfg, out, err);
    if (name == "forecast") return cmd_forecast(cfg, out);
    return cmd_stability(cfg, out);
  } catch (const ConfigError& e) {
    err << "dvq " << name << ": configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "dvq " << name << ": data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "dvq " << name << ": internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace dvq::cli
