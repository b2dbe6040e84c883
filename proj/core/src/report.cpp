// Copyright 2026 The qfc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <tuple>
#include <map>
#include <sstream>

#include "qfc/errors.hpp"
#include "qfc/harness.hpp"

namespace qfc::harness {
namespace {

// Shortest text that parses back to the same double.
std::string real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double parse_real(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw IoError("results: not a number: '" + s + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw IoError("results: not an integer: '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed while writing " + path.string());
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Series {
  std::string name;
  std::vector<double> x, y, lo, hi;  // lo/hi empty when there is no band
};

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string render_svg(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, const std::vector<Series>& series) {
  constexpr double kW = 640, kH = 420, kL = 70, kR = 180, kT = 40, kB = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool any = false;
  auto extend = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    if (!any) {
      x0 = x1 = x;
      y0 = y1 = y;
      any = true;
    }
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      extend(s.x[i], s.y[i]);
      if (!s.lo.empty()) {
        extend(s.x[i], s.lo[i]);
        extend(s.x[i], s.hi[i]);
      }
    }
  }
  if (x1 - x0 < 1e-12) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kT + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n";
  o << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    o << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << fixed(kT + ph + 16)
      << "\" text-anchor=\"middle\">" << fixed(xv) << "</text>\n";
    o << "<text x=\"" << fixed(kL - 6) << "\" y=\"" << fixed(py(yv) + 4)
      << "\" text-anchor=\"end\">" << fixed(yv) << "</text>\n";
  }
  o << "<text x=\"" << fixed(kL + pw / 2) << "\" y=\"" << fixed(kH - 10)
    << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  o << "<text x=\"16\" y=\"" << fixed(kT + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << fixed(kT + ph / 2) << ")\">" << ylabel << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
    // Contiguous runs of finite points.
    std::vector<std::vector<std::size_t>> runs(1);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const bool ok = std::isfinite(s.y[i]) &&
                      (s.lo.empty() || (std::isfinite(s.lo[i]) && std::isfinite(s.hi[i])));
      if (ok) {
        runs.back().push_back(i);
      } else if (!runs.back().empty()) {
        runs.emplace_back();
      }
    }
    for (const auto& run : runs) {
      if (run.empty()) continue;
      if (!s.lo.empty()) {
        o << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (std::size_t i : run) o << fixed(px(s.x[i])) << ',' << fixed(py(s.hi[i])) << ' ';
        for (auto it = run.rbegin(); it != run.rend(); ++it) {
          o << fixed(px(s.x[*it])) << ',' << fixed(py(s.lo[*it])) << ' ';
        }
        o << "\"/>\n";
      }
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i : run) o << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i])) << ' ';
      o << "\"/>\n";
      for (std::size_t i : run) {
        o << "<circle cx=\"" << fixed(px(s.x[i])) << "\" cy=\"" << fixed(py(s.y[i]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    const double ly = kT + 14 + 18.0 * static_cast<double>(si);
    o << "<line x1=\"" << fixed(kL + pw + 10) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\""
      << fixed(kL + pw + 30) << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << fixed(kL + pw + 34) << "\" y=\"" << fixed(ly) << "\">" << s.name
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string series_name(const std::string& scenario, double epsilon) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s eps=%g", scenario.c_str(), epsilon);
  return buf;
}

}  // namespace

std::string results_csv_header() {
  return "scenario,noise,alpha,epsilon,seed,episodes,aborted,mean_fidelity,std_fidelity,"
         "mean_steps_to_threshold,std_steps_to_threshold,unreached_count";
}

std::string results_csv_row(const CellResult& c) {
  std::ostringstream o;
  o << c.scenario << ',' << to_string(c.noise) << ',' << real(c.alpha) << ',' << real(c.epsilon)
    << ',' << c.seed << ',' << c.episodes << ',' << c.aborted << ',' << real(c.mean_fidelity)
    << ',' << real(c.std_fidelity) << ',' << real(c.mean_steps_to_threshold) << ','
    << real(c.std_steps_to_threshold) << ',' << c.unreached_count;
  return o.str();
}

CellResult parse_results_csv_row(const std::string& line) {
  const auto f = split(line);
  if (f.size() != 12) throw IoError("results: expected 12 fields in '" + line + "'");
  CellResult c;
  c.scenario = f[0];
  try {
    c.noise = parse_noise_kind(f[1]);
  } catch (const Error&) {
    throw IoError("results: unknown noise '" + f[1] + "'");
  }
  c.alpha = parse_real(f[2]);
  c.epsilon = parse_real(f[3]);
  c.seed = parse_int<std::uint64_t>(f[4]);
  c.episodes = parse_int<int>(f[5]);
  c.aborted = parse_int<int>(f[6]);
  c.mean_fidelity = parse_real(f[7]);
  c.std_fidelity = parse_real(f[8]);
  c.mean_steps_to_threshold = parse_real(f[9]);
  c.std_steps_to_threshold = parse_real(f[10]);
  c.unreached_count = parse_int<int>(f[11]);
  return c;
}

std::vector<CellResult> load_results(const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / "results.csv";
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != results_csv_header()) {
    throw IoError(path.string() + ": missing or wrong header");
  }
  std::vector<CellResult> out;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_results_csv_row(line));
  }

  std::ifstream curves(dir / "curves.csv");
  if (!curves) return out;
  if (!std::getline(curves, line) || line != "scenario,noise,alpha,epsilon,t,mean_fidelity") {
    throw IoError("curves.csv: missing or wrong header");
  }
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::size_t> index;
  for (std::size_t i = 0; i < out.size(); ++i) {
    index[{out[i].scenario, to_string(out[i].noise), real(out[i].alpha), real(out[i].epsilon)}] = i;
  }
  while (std::getline(curves, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 6) throw IoError("curves.csv: expected 6 fields in '" + line + "'");
    auto it = index.find({f[0], f[1], f[2], f[3]});
    if (it == index.end()) throw IoError("curves.csv: row without a result: '" + line + "'");
    auto& curve = out[it->second].mean_curve;
    const auto t = parse_int<std::size_t>(f[4]);
    if (t != curve.size()) throw IoError("curves.csv: out-of-order time index");
    curve.push_back(parse_real(f[5]));
  }
  return out;
}

void emit_report(const std::vector<CellResult>& results,
                 const std::vector<ThresholdEntry>& thresholds, double f_star,
                 const std::filesystem::path& out_dir) {
  if (results.empty()) throw ContractViolation("emit_report: no results");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::string csv = results_csv_header() + "\n";
  for (const auto& r : results) csv += results_csv_row(r) + "\n";
  write_file(out_dir / "results.csv", csv);

  std::string th = "scenario,noise,epsilon,f_star,threshold_alpha\n";
  for (const auto& t : thresholds) {
    th += t.scenario + "," + to_string(t.noise) + "," + real(t.epsilon) + "," + real(f_star) +
          "," + (t.alpha ? real(*t.alpha) : std::string("none")) + "\n";
  }
  write_file(out_dir / "thresholds.csv", th);

  std::string cv = "scenario,noise,alpha,epsilon,t,mean_fidelity\n";
  for (const auto& r : results) {
    for (std::size_t t = 0; t < r.mean_curve.size(); ++t) {
      cv += r.scenario + "," + to_string(r.noise) + "," + real(r.alpha) + "," + real(r.epsilon) +
            "," + std::to_string(t) + "," + real(r.mean_curve[t]) + "\n";
    }
  }
  write_file(out_dir / "curves.csv", cv);

  std::vector<NoiseKind> noises;
  for (const auto& r : results) {
    if (std::find(noises.begin(), noises.end(), r.noise) == noises.end()) {
      noises.push_back(r.noise);
    }
  }
  for (NoiseKind noise : noises) {
    std::vector<Series> fid, steps;
    for (const auto& r : results) {
      if (r.noise != noise) continue;
      const std::string name = series_name(r.scenario, r.epsilon);
      auto pick = [&name](std::vector<Series>& v) -> Series& {
        auto it = std::find_if(v.begin(), v.end(), [&](const Series& s) { return s.name == name; });
        if (it != v.end()) return *it;
        v.push_back({name, {}, {}, {}, {}});
        return v.back();
      };
      Series& f = pick(fid);
      f.x.push_back(r.alpha);
      f.y.push_back(r.mean_fidelity);
      f.lo.push_back(r.mean_fidelity - r.std_fidelity);
      f.hi.push_back(r.mean_fidelity + r.std_fidelity);
      Series& s = pick(steps);
      s.x.push_back(r.alpha);
      s.y.push_back(r.mean_steps_to_threshold);
      s.lo.push_back(r.mean_steps_to_threshold - r.std_steps_to_threshold);
      s.hi.push_back(r.mean_steps_to_threshold + r.std_steps_to_threshold);
    }
    std::vector<Series> thr;
    for (const auto& t : thresholds) {
      if (t.noise != noise) continue;
      auto it = std::find_if(thr.begin(), thr.end(),
                             [&](const Series& s) { return s.name == t.scenario; });
      if (it == thr.end()) {
        thr.push_back({t.scenario, {}, {}, {}, {}});
        it = std::prev(thr.end());
      }
      it->x.push_back(t.epsilon);
      it->y.push_back(t.alpha ? *t.alpha : std::numeric_limits<double>::quiet_NaN());
    }
    const std::string n = to_string(noise);
    write_file(out_dir / (n + "_fidelity.svg"),
               render_svg(n + ": terminal fidelity", "alpha", "mean fidelity", fid));
    write_file(out_dir / (n + "_steps.svg"),
               render_svg(n + ": steps to F >= " + real(f_star), "alpha", "mean steps", steps));
    write_file(out_dir / (n + "_threshold.svg"),
               render_svg(n + ": largest alpha with F >= " + real(f_star), "epsilon", "alpha",
                          thr));
  }
}

}  // namespace qfc::harness
