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

#include "dvq/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <system_error>
#include <unistd.h>

namespace dvq {

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw DataError("cannot create directory " + path.parent_path().string() + ": " +
                      ec.message());
    }
  }
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw DataError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot rename onto " + path.string());
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string ensemble_csv(const ForecastEnsemble& ens) {
  std::string out = "path,seed";
  for (std::size_t c = 0; c < ens.paths.cols(); ++c) out += ",v" + std::to_string(c + 1);
  out += '\n';
  for (std::size_t r = 0; r < ens.paths.rows(); ++r) {
    out += std::to_string(r) + ',' + std::to_string(ens.seeds[r]);
    for (double v : ens.paths.row(r)) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

std::string summary_csv(const TrendSummary& summary, std::span<const double> actual) {
  const bool with_actual = !actual.empty();
  std::string out = "step,mean,variance,lower,upper";
  if (with_actual) out += ",actual";
  out += '\n';
  for (std::size_t i = 0; i < summary.size(); ++i) {
    out += std::to_string(i + 1) + ',' + format_number(summary.mean[i]) + ',' +
           format_number(summary.variance[i]) + ',' + format_number(summary.lower[i]) + ',' +
           format_number(summary.upper[i]);
    if (with_actual) {
      out += ',';
      if (i < actual.size()) out += format_number(actual[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v, int precision = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Round-numbered ticks (steps of 1, 2 or 5 times a power of ten) inside [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
  const double raw = (hi - lo) / target;
  if (!(raw > 0.0) || !std::isfinite(raw)) return {lo};
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {2.0, 5.0, 10.0}) {
    if (std::abs((hi - lo) / (m * mag) - target) < std::abs((hi - lo) / step - target)) step = m * mag;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

struct Frame {
  double left = 60, right = 20, top = 40, bottom = 40;
  double width = 800, height = 400;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  [[nodiscard]] double px(double x) const {
    return left + (x - x0) / (x1 - x0) * (width - left - right);
  }
  [[nodiscard]] double py(double y) const {
    return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom);
  }
};

std::string polyline(const Frame& f, double x_start, std::span<const double> ys,
                     const std::string& style) {
  std::string out = "<polyline fill=\"none\" " + style + " points=\"";
  for (std::size_t i = 0; i < ys.size(); ++i) {
    out += fmt(f.px(x_start + static_cast<double>(i))) + ',' + fmt(f.py(ys[i])) + ' ';
  }
  return out + "\"/>\n";
}

std::string header(double w, double h, const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w, 0) + "\" height=\"" +
         fmt(h, 0) + "\" viewBox=\"0 0 " + fmt(w, 0) + ' ' + fmt(h, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         "<text x=\"" + fmt(w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         xml_escape(title) + "</text>\n";
}

}  // namespace

std::string sweep_csv(const SweepResult& result) {
  std::string out = "n1,n2,sse,ok,reg_dead_units,def_dead_units,empty_rows,status\n";
  for (const auto& c : result.cells) {
    out += std::to_string(c.n1) + ',' + std::to_string(c.n2) + ',' + format_number(c.sse) + ',' +
           (c.ok ? "1" : "0") + ',' + std::to_string(c.reg_dead_units) + ',' +
           std::to_string(c.def_dead_units) + ',' + std::to_string(c.empty_rows) + ',' +
           csv_quote(c.status) + '\n';
  }
  return out;
}

std::string trend_svg(const TrendPlot& plot) {
  Frame f;
  const std::size_t nh = plot.history.size();
  const std::size_t nf = plot.summary != nullptr ? plot.summary->size() : 0;
  const std::size_t nt = plot.truth.size();
  const std::size_t total = nh + std::max(nf, nt);
  f.x0 = 0.0;
  f.x1 = std::max<double>(1.0, static_cast<double>(total) - 1.0);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto widen = [&](std::span<const double> v) {
    for (double x : v) {
      if (std::isfinite(x)) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  };
  widen(plot.history);
  widen(plot.truth);
  if (plot.summary != nullptr) {
    widen(plot.summary->lower);
    widen(plot.summary->upper);
    widen(plot.summary->mean);
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  f.y0 = lo - pad;
  f.y1 = hi + pad;

  std::string out = header(f.width, f.height, plot.title);
  // Axes with five ticks each.
  out += "<g stroke=\"#888\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + fmt(f.left) + "\" y1=\"" + fmt(f.height - f.bottom) + "\" x2=\"" +
         fmt(f.width - f.right) + "\" y2=\"" + fmt(f.height - f.bottom) + "\"/>\n";
  out += "<line x1=\"" + fmt(f.left) + "\" y1=\"" + fmt(f.top) + "\" x2=\"" + fmt(f.left) +
         "\" y2=\"" + fmt(f.height - f.bottom) + "\"/>\n</g>\n";
  for (double y : nice_ticks(f.y0, f.y1)) {
    out += "<text x=\"" + fmt(f.left - 6) + "\" y=\"" + fmt(f.py(y) + 4) +
           "\" text-anchor=\"end\">" + tick_label(y) + "</text>\n";
  }
  // x labels count steps from the forecast origin.
  const double shift = static_cast<double>(nh);
  for (double x : nice_ticks(f.x0 - shift, f.x1 - shift)) {
    out += "<text x=\"" + fmt(f.px(x + shift)) + "\" y=\"" + fmt(f.height - f.bottom + 16) +
           "\" text-anchor=\"middle\">" + tick_label(x) + "</text>\n";
  }

  const double origin = static_cast<double>(nh);
  if (plot.summary != nullptr && nf > 0) {
    const auto& s = *plot.summary;
    std::string band = "<polygon fill=\"#4a90d9\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < nf; ++i) {
      band += fmt(f.px(origin + static_cast<double>(i))) + ',' + fmt(f.py(s.upper[i])) + ' ';
    }
    for (std::size_t i = nf; i-- > 0;) {
      band += fmt(f.px(origin + static_cast<double>(i))) + ',' + fmt(f.py(s.lower[i])) + ' ';
    }
    out += band + "\"/>\n";
  }
  if (nh > 0) {
    out += polyline(f, 0.0, plot.history, "stroke=\"#333\" stroke-width=\"1.2\"");
    out += "<line x1=\"" + fmt(f.px(origin)) + "\" y1=\"" + fmt(f.top) + "\" x2=\"" +
           fmt(f.px(origin)) + "\" y2=\"" + fmt(f.height - f.bottom) +
           "\" stroke=\"#aaa\" stroke-dasharray=\"4 3\"/>\n";
  }
  if (nt > 0) {
    out += polyline(f, origin, plot.truth, "stroke=\"#2a9d3a\" stroke-width=\"1.2\"");
  }
  if (plot.summary != nullptr && nf > 0) {
    out += polyline(f, origin, plot.summary->mean, "stroke=\"#c0392b\" stroke-width=\"1.6\"");
  }

  // Legend.
  struct Entry {
    const char* colour;
    std::string label;
  };
  std::vector<Entry> legend;
  if (nh > 0) legend.push_back({"#333", "observed"});
  if (nt > 0) legend.push_back({"#2a9d3a", "realized"});
  if (plot.summary != nullptr && nf > 0) {
    legend.push_back({"#c0392b", "mean forecast"});
    legend.push_back({"#4a90d9", "band " + tick_label(plot.summary->lower_level) + ".." +
                                     tick_label(plot.summary->upper_level)});
  }
  double ly = f.top + 8;
  for (const auto& e : legend) {
    out += "<rect x=\"" + fmt(f.width - f.right - 150) + "\" y=\"" + fmt(ly - 8) +
           "\" width=\"14\" height=\"8\" fill=\"" + e.colour + "\"/>\n";
    out += "<text x=\"" + fmt(f.width - f.right - 130) + "\" y=\"" + fmt(ly) + "\">" +
           xml_escape(e.label) + "</text>\n";
    ly += 16;
  }
  return out + "</svg>\n";
}

namespace {

// Viridis-like ramp through five anchor colours.
std::string ramp(double t) {
  static constexpr double anchors[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double w = t - i;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(anchors[i][0] + w * (anchors[i + 1][0] - anchors[i][0])),
                static_cast<int>(anchors[i][1] + w * (anchors[i + 1][1] - anchors[i][1])),
                static_cast<int>(anchors[i][2] + w * (anchors[i + 1][2] - anchors[i][2])));
  return buf;
}

}  // namespace

std::string sweep_heatmap_svg(const SweepResult& result, const std::string& title) {
  const std::size_t a = result.grid.n1_values.size();
  const std::size_t b = result.grid.n2_values.size();
  const double cell = std::clamp(480.0 / static_cast<double>(std::max(a, b)), 6.0, 48.0);
  const double left = 70;
  const double top = 50;
  const double width = left + cell * static_cast<double>(b) + 120;
  const double height = top + cell * static_cast<double>(a) + 50;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : result.cells) {
    if (c.ok && c.sse > 0.0) {
      lo = std::min(lo, std::log10(c.sse));
      hi = std::max(hi, std::log10(c.sse));
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  const double span = hi - lo > 1e-12 ? hi - lo : 1.0;

  std::string out = header(width, height, title);
  out += "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\">"
         "<rect width=\"6\" height=\"6\" fill=\"#ddd\"/>"
         "<path d=\"M0,6 L6,0\" stroke=\"#999\"/></pattern></defs>\n";
  const std::size_t label_every_a = std::max<std::size_t>(1, a / 10);
  const std::size_t label_every_b = std::max<std::size_t>(1, b / 10);
  for (std::size_t i = 0; i < a; ++i) {
    const double y = top + cell * static_cast<double>(i);
    if (i % label_every_a == 0) {
      out += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(y + cell / 2 + 4) +
             "\" text-anchor=\"end\">" + std::to_string(result.grid.n1_values[i]) + "</text>\n";
    }
    for (std::size_t j = 0; j < b; ++j) {
      const auto& c = result.at(i, j);
      const double x = left + cell * static_cast<double>(j);
      std::string fill = "url(#hatch)";
      if (c.ok) {
        const double v = c.sse > 0.0 ? std::log10(c.sse) : lo;
        fill = ramp((v - lo) / span);
      }
      out += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(cell) +
             "\" height=\"" + fmt(cell) + "\" fill=\"" + fill + "\"><title>n1=" +
             std::to_string(c.n1) + " n2=" + std::to_string(c.n2) + " sse=" +
             format_number(c.sse) + "</title></rect>\n";
    }
  }
  for (std::size_t j = 0; j < b; j += label_every_b) {
    const double x = left + cell * (static_cast<double>(j) + 0.5);
    out += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(top + cell * static_cast<double>(a) + 16) +
           "\" text-anchor=\"middle\">" + std::to_string(result.grid.n2_values[j]) + "</text>\n";
  }
  out += "<text x=\"" + fmt(left + cell * static_cast<double>(b) / 2) + "\" y=\"" +
         fmt(height - 10) + "\" text-anchor=\"middle\">n2 (deformation prototypes)</text>\n";
  out += "<text x=\"16\" y=\"" + fmt(top + cell * static_cast<double>(a) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fmt(top + cell * static_cast<double>(a) / 2) + ")\">n1 (regressor prototypes)</text>\n";

  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      const auto& c = result.at(i, j);
      if (c.ok && c.n1 == result.best_n1 && c.n2 == result.best_n2) {
        out += "<rect x=\"" + fmt(left + cell * static_cast<double>(j)) + "\" y=\"" +
               fmt(top + cell * static_cast<double>(i)) + "\" width=\"" + fmt(cell) +
               "\" height=\"" + fmt(cell) +
               "\" fill=\"none\" stroke=\"red\" stroke-width=\"3\"/>\n";
      }
    }
  }

  // Colour bar.
  const double bx = left + cell * static_cast<double>(b) + 30;
  const double bh = cell * static_cast<double>(a);
  for (int s = 0; s < 50; ++s) {
    out += "<rect x=\"" + fmt(bx) + "\" y=\"" + fmt(top + bh * (49 - s) / 50.0) +
           "\" width=\"16\" height=\"" + fmt(bh / 50.0 + 0.5) + "\" fill=\"" + ramp(s / 49.0) +
           "\"/>\n";
  }
  out += "<text x=\"" + fmt(bx + 20) + "\" y=\"" + fmt(top + 10) + "\">" + tick_label(std::pow(10.0, hi)) +
         "</text>\n";
  out += "<text x=\"" + fmt(bx + 20) + "\" y=\"" + fmt(top + bh) + "\">" + tick_label(std::pow(10.0, lo)) +
         "</text>\n";
  return out + "</svg>\n";
}

}  // namespace dvq
