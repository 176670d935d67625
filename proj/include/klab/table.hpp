#ifndef KLAB_TABLE_HPP
#define KLAB_TABLE_HPP

// Row tables rendered as CSV (header, comma separator, LF endings, doubles with
// 17 significant digits) or as a JSON array of row objects.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "klab/errors.hpp"

namespace klab {

using Cell = std::variant<std::int64_t, double, std::string>;

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}

class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) {
      throw Error(ErrorKind::InvalidInput, "row width does not match the header");
    }
    rows_.push_back(std::move(row));
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t k = 0; k < columns_.size(); ++k) os << (k ? "," : "") << columns_[k];
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_cell(row[k]);
      os << '\n';
    }
  }

  nlohmann::ordered_json to_json() const {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : rows_) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t k = 0; k < row.size(); ++k) {
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) {
                if (std::isfinite(v)) obj[columns_[k]] = v;
                else obj[columns_[k]] = format_double(v);
              } else {
                obj[columns_[k]] = v;
              }
            },
            row[k]);
      }
      arr.push_back(std::move(obj));
    }
    return arr;
  }

  std::string csv() const {
    std::ostringstream os;
    write_csv(os);
    return os.str();
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace klab

#endif  // KLAB_TABLE_HPP
