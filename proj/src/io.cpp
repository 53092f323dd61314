#include "bsq/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace bsq {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

void Table::add_row(const std::vector<double>& row) {
  if (row.size() != cols_.size()) throw std::invalid_argument("Table: row width does not match the header");
  rows_.push_back(row);
}

void Table::add_summary(const std::string& key, double value) { summary_.emplace_back(key, format_double(value)); }

void Table::add_summary(const std::string& key, const std::string& value) { summary_.emplace_back(key, value); }

void Table::write(std::ostream& out) const {
  out << "#";
  for (const auto& c : cols_) out << ' ' << c;
  out << '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? " " : "") << format_double(r[i]);
    out << '\n';
  }
  out << "# summary";
  for (const auto& [k, v] : summary_) out << ' ' << k << '=' << v;
  out << '\n';
}

void Table::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  write(f);
}

}  // namespace bsq
