#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace bsq {

// Plain columnar text: '#'-prefixed header naming the columns, whitespace-separated
// rows, and one "# summary key=value ..." footer line.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : cols_(std::move(columns)) {}
  void add_row(const std::vector<double>& row);
  void add_summary(const std::string& key, double value);
  void add_summary(const std::string& key, const std::string& value);
  void write(std::ostream& out) const;
  void save(const std::string& path) const;

  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::vector<double>>& data() const { return rows_; }

 private:
  std::vector<std::string> cols_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::pair<std::string, std::string>> summary_;
};

std::string format_double(double v);

}  // namespace bsq
