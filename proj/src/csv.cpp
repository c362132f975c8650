#include "sigsvdd/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sigsvdd {

RawSeries read_series_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_series_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("read_series_csv: bad value '" + cell + "' in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("read_series_csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("read_series_csv: empty file " + path);
  RawSeries s;
  s.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t c = 0; c < rows[t].size(); ++c)
      s.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = rows[t][c];
  return s;
}

void read_point_labels(const std::string& path, RawSeries& series) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_point_labels: cannot open " + path);
  std::vector<int> labels;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int v = 0;
    auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || (v != 0 && v != 1))
      throw std::runtime_error("read_point_labels: bad label '" + line + "' in " + path);
    labels.push_back(v);
  }
  if (static_cast<int>(labels.size()) != series.length())
    throw std::runtime_error("read_point_labels: label count does not match series length");
  series.point_labels = std::move(labels);
}

void write_series_csv(const RawSeries& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_series_csv: cannot open " + path);
  char buf[64];
  for (Eigen::Index t = 0; t < s.values.rows(); ++t) {
    for (Eigen::Index c = 0; c < s.values.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", s.values(t, c));
      f << (c == 0 ? "" : ",") << buf;
    }
    f << "\n";
  }
}

void write_point_labels(const RawSeries& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_point_labels: cannot open " + path);
  for (int lab : s.point_labels) f << lab << "\n";
}

}  // namespace sigsvdd
