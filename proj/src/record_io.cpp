// Copyright 2026 The uebcbf Authors
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
#include "uebcbf/record_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "uebcbf/errors.hpp"

namespace uebcbf {

namespace {

void put(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_num(const std::string& s) {
  // strtod handles inf/nan spellings printed by %g.
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw IoError("bad numeric CSV cell '" + s + "'");
  }
  return v;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << body;
  out.close();
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace

std::string csv_header(int n, int m) {
  std::string h = "t";
  for (int i = 0; i < n; ++i) h += ",x" + std::to_string(i);
  for (int j = 0; j < m; ++j) h += ",u" + std::to_string(j);
  h += ",mode";
  for (int i = 0; i < n; ++i) h += ",d" + std::to_string(i);
  for (int i = 0; i < n; ++i) h += ",dhat" + std::to_string(i);
  h += ",ebar,h,hb_T,min_h_margin,qp_status";
  return h;
}

std::string to_csv(const SimRecord& rec) {
  std::string out = csv_header(rec.n, rec.m) + "\n";
  for (const auto& r : rec.rows) {
    put(out, r.t);
    for (int i = 0; i < rec.n; ++i) out += ',', put(out, r.x[i]);
    for (int j = 0; j < rec.m; ++j) out += ',', put(out, r.u[j]);
    out += ',' + r.mode;
    for (int i = 0; i < rec.n; ++i) out += ',', put(out, r.d_true[i]);
    for (int i = 0; i < rec.n; ++i) out += ',', put(out, r.d_hat[i]);
    for (double v : {r.e_bar, r.h, r.hb_T, r.min_h_margin}) {
      out += ',';
      put(out, v);
    }
    out += ',' + r.qp_status + '\n';
  }
  return out;
}

void write_csv(const SimRecord& record, const std::string& path) {
  if (record.rows.empty()) {
    throw IoError("refusing to write empty record to " + path);
  }
  write_file(path, to_csv(record));
}

SimRecord parse_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw IoError("empty CSV");
  const auto header = split(line);
  SimRecord rec;
  for (const auto& c : header) {
    if (c.size() > 1 && c[0] == 'x') ++rec.n;
    if (c.size() > 1 && c[0] == 'u') ++rec.m;
  }
  if (line != csv_header(rec.n, rec.m)) throw IoError("unexpected CSV header");
  const std::size_t width = header.size();
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != width) throw IoError("CSV row has wrong width");
    SimRow r;
    std::size_t c = 0;
    r.t = parse_num(cells[c++]);
    r.x.resize(rec.n);
    for (int i = 0; i < rec.n; ++i) r.x[i] = parse_num(cells[c++]);
    r.u.resize(rec.m);
    for (int j = 0; j < rec.m; ++j) r.u[j] = parse_num(cells[c++]);
    r.mode = cells[c++];
    r.d_true.resize(rec.n);
    for (int i = 0; i < rec.n; ++i) r.d_true[i] = parse_num(cells[c++]);
    r.d_hat.resize(rec.n);
    for (int i = 0; i < rec.n; ++i) r.d_hat[i] = parse_num(cells[c++]);
    r.e_bar = parse_num(cells[c++]);
    r.h = parse_num(cells[c++]);
    r.hb_T = parse_num(cells[c++]);
    r.min_h_margin = parse_num(cells[c++]);
    r.qp_status = cells[c++];
    rec.rows.push_back(std::move(r));
  }
  return rec;
}

SimRecord read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str());
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

namespace {

struct Panel {
  double x0, y0, w, h;
};

std::string polyline(const std::vector<double>& xs,
                     const std::vector<double>& ys, const Panel& p,
                     const std::string& color, double xmin, double xmax,
                     double ymin, double ymax) {
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  std::string pts;
  char buf[64];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
    const double px = p.x0 + (xs[i] - xmin) / (xmax - xmin) * p.w;
    const double py = p.y0 + p.h - (ys[i] - ymin) / (ymax - ymin) * p.h;
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
    pts += buf;
  }
  return "<polyline fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"1.2\" points=\"" + pts + "\"/>\n";
}

std::string frame(const Panel& p, const std::string& title) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.0f\" y=\"%.0f\" width=\"%.0f\" height=\"%.0f\" "
                "fill=\"none\" stroke=\"#888\"/>\n<text x=\"%.0f\" y=\"%.0f\" "
                "font-size=\"12\">",
                p.x0, p.y0, p.w, p.h, p.x0 + 4, p.y0 - 4);
  return buf + title + "</text>\n";
}

void range(const std::vector<double>& v, double& lo, double& hi) {
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
}

}  // namespace

std::string svg_document(const SimRecord& rec) {
  if (rec.rows.empty()) throw IoError("cannot render an empty record");
  const char* colors[] = {"#7b3fa0", "#1f77b4", "#d62728", "#2ca02c",
                          "#ff7f0e", "#8c564b"};
  std::vector<double> t;
  for (const auto& r : rec.rows) t.push_back(r.t);
  const double t0 = t.front(), t1 = t.back();

  const double ph = 150;
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"760\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto series = [&](const Panel& p, const std::string& title,
                    const std::vector<std::vector<double>>& ys) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& y : ys) range(y, lo, hi);
    out += frame(p, title);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      out += polyline(t, ys[i], p, colors[i % 6], t0, t1, lo, hi);
    }
  };

  std::vector<std::vector<double>> xs(rec.n), us(rec.m), hs(2);
  for (const auto& r : rec.rows) {
    for (int i = 0; i < rec.n; ++i) xs[i].push_back(r.x[i]);
    for (int j = 0; j < rec.m; ++j) us[j].push_back(r.u[j]);
    hs[0].push_back(r.h);
    hs[1].push_back(r.min_h_margin);
  }
  series({40, 30, 520, ph}, "state", xs);
  series({40, 220, 520, ph}, "input", us);
  series({40, 410, 520, ph}, "h and min margin", hs);

  const Panel phase{600, 30, 270, 270};
  if (rec.n >= 2) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    range(xs[0], xlo, xhi);
    range(xs[1], ylo, yhi);
    out += frame(phase, "phase x0-x1");
    out += polyline(xs[0], xs[1], phase, colors[0], xlo, xhi, ylo, yhi);
  }
  out += "</svg>\n";
  return out;
}

void render_svg(const SimRecord& record, const std::string& path) {
  if (record.rows.empty()) {
    throw IoError("refusing to render empty record to " + path);
  }
  write_file(path, svg_document(record));
}

}  // namespace uebcbf
