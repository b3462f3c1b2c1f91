#pragma once
// CSV tables, JSON documents and small SVG line plots.  Plots are always
// rendered from a CSV file on disk.

#include <string>
#include <vector>

#include "json.hpp"

namespace fc {

using Json = nlohmann::ordered_json;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  void add(std::vector<double> row);
  std::vector<double> column(const std::string& name) const;
};

// %.17g cells, '\n' line ends, so equal tables give equal bytes.
std::string to_csv(const Table& t);
void write_csv(const std::string& path, const Table& t);
Table read_csv(const std::string& path);

void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

struct PlotSpec {
  std::string title;
  std::string x;               // column name
  std::vector<std::string> y;  // column names, one series each
  bool log_x = false;
  bool log_y = false;
  bool points = true;
  bool lines = true;
};

std::string svg_from_table(const Table& t, const PlotSpec& p);
// reads csv_path, writes svg_path
void plot_csv(const std::string& csv_path, const std::string& svg_path, const PlotSpec& p);

std::string format_double(double v);

}  // namespace fc
