#include "fracchain/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "fracchain/stats.hpp"

namespace fc {

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw Error("Table::add: row width does not match the header");
  rows.push_back(std::move(row));
}

std::vector<double> Table::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error("Table: no column '" + name + "'");
  std::size_t k = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[k]);
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const Table& t) {
  std::string s;
  for (std::size_t k = 0; k < t.columns.size(); ++k) s += (k ? "," : "") + t.columns[k];
  s += '\n';
  for (const auto& r : t.rows) {
    for (std::size_t k = 0; k < r.size(); ++k) s += (k ? "," : "") + format_double(r[k]);
    s += '\n';
  }
  return s;
}

namespace {

void ensure_parent(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

void write_csv(const std::string& path, const Table& t) { write_text(path, to_csv(t)); }

Table read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read " + path);
  Table t;
  std::string line;
  if (!std::getline(f, line)) return t;
  std::stringstream hs(line);
  for (std::string c; std::getline(hs, c, ',');) t.columns.push_back(c);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) row.push_back(std::strtod(c.c_str(), nullptr));
    if (row.size() != t.columns.size()) throw Error("malformed csv row in " + path);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read " + path);
  try {
    return Json::parse(f);
  } catch (const std::exception& e) {
    throw Error("invalid JSON in " + path + ": " + e.what());
  }
}

namespace {

const char* kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string svg_from_table(const Table& t, const PlotSpec& p) {
  const double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  std::vector<double> xs = t.column(p.x);
  auto tx = [&](double v) { return p.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return p.log_y ? std::log10(v) : v; };
  auto ok = [](double v, bool lg) { return std::isfinite(v) && (!lg || v > 0); };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  std::vector<std::vector<double>> ys;
  for (const auto& name : p.y) ys.push_back(t.column(name));
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!ok(xs[k], p.log_x)) continue;
    for (const auto& y : ys) {
      if (!ok(y[k], p.log_y)) continue;
      x0 = std::min(x0, tx(xs[k]));
      x1 = std::max(x1, tx(xs[k]));
      y0 = std::min(y0, ty(y[k]));
      y1 = std::max(y1, ty(y[k]));
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(p.title) << "</text>\n";
  s << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    double gx = L + (W - L - R) * k / 4.0, gy = H - B - (H - T - B) * k / 4.0;
    s << "<text x=\"" << gx << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
      << num(p.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">" << num(p.log_y ? std::pow(10.0, fy) : fy)
      << "</text>\n";
  }
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << esc(p.x)
    << (p.log_x ? " (log)" : "") << "</text>\n";
  for (std::size_t c = 0; c < ys.size(); ++c) {
    const char* col = kColours[c % 8];
    std::string path;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (!ok(xs[k], p.log_x) || !ok(ys[c][k], p.log_y)) continue;
      path += (path.empty() ? "M" : " L") + num(px(xs[k])) + " " + num(py(ys[c][k]));
      if (p.points)
        s << "<circle cx=\"" << num(px(xs[k])) << "\" cy=\"" << num(py(ys[c][k])) << "\" r=\"2.5\" fill=\"" << col << "\"/>\n";
    }
    if (p.lines && !path.empty()) s << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << col << "\"/>\n";
    s << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 + 16 * c << "\" fill=\"" << col << "\">" << esc(p.y[c])
      << (p.log_y ? " (log)" : "") << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void plot_csv(const std::string& csv_path, const std::string& svg_path, const PlotSpec& p) {
  write_text(svg_path, svg_from_table(read_csv(csv_path), p));
}

}  // namespace fc
