#pragma once

// Comma-separated numeric tables with a header row. Values are written in the
// shortest form that parses back to the same double.

#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagp/error.hpp"

namespace lagp {

struct Table {
  std::vector<std::string> names;
  Eigen::MatrixXd data;

  Eigen::Index column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return static_cast<Eigen::Index>(i);
    }
    throw DataError("missing column '" + name + "'");
  }
  bool has(const std::string& name) const {
    for (const auto& n : names) if (n == name) return true;
    return false;
  }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_real(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw DataError("not a finite number '" + s + "' at " + where);
  }
  return v;
}

}  // namespace detail

inline std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

inline Table parse_csv(std::istream& in, const std::string& source = "input") {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!detail::trim(line).empty()) break;
  }
  if (lineno == 0 || detail::trim(line).empty()) throw DataError(source + ": empty file");
  t.names = detail::split_commas(detail::trim(line));
  const std::size_t cols = t.names.size();
  std::vector<double> vals;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_commas(detail::trim(line));
    if (cells.size() != cols) {
      throw DataError(source + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(cols) + " fields, found " + std::to_string(cells.size()));
    }
    for (const auto& c : cells) {
      vals.push_back(detail::parse_real(c, source + ":" + std::to_string(lineno)));
    }
    ++rows;
  }
  t.data.resize(rows, static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      t.data(i, static_cast<Eigen::Index>(j)) = vals[static_cast<std::size_t>(i) * cols + j];
    }
  }
  return t;
}

inline Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_csv(in, path);
}

inline void print_csv(std::ostream& out, const Table& t) {
  detail::require(static_cast<Eigen::Index>(t.names.size()) == t.data.cols(), ErrorKind::usage,
                  "table header and data widths differ");
  for (std::size_t j = 0; j < t.names.size(); ++j) out << (j ? "," : "") << t.names[j];
  out << '\n';
  for (Eigen::Index i = 0; i < t.data.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.data.cols(); ++j) {
      out << (j ? "," : "") << format_real(t.data(i, j));
    }
    out << '\n';
  }
}

inline void write_csv(const std::string& path, const Table& t) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  print_csv(out, t);
  if (!out) throw DataError("write failed for '" + path + "'");
}

/// Design columns x1..xp (in file order) and the response y, if present.
struct Dataset {
  Eigen::MatrixXd X;
  std::optional<Eigen::VectorXd> y;
};

inline Dataset to_dataset(const Table& t, bool require_y) {
  Dataset d;
  std::vector<Eigen::Index> xcols;
  for (std::size_t j = 0; j < t.names.size(); ++j) {
    const auto& n = t.names[j];
    if (n.size() > 1 && n[0] == 'x' && n.find_first_not_of("0123456789", 1) == std::string::npos) {
      xcols.push_back(static_cast<Eigen::Index>(j));
    }
  }
  detail::require(!xcols.empty(), ErrorKind::data, "no x1..xp columns found");
  d.X.resize(t.data.rows(), static_cast<Eigen::Index>(xcols.size()));
  for (std::size_t k = 0; k < xcols.size(); ++k) d.X.col(static_cast<Eigen::Index>(k)) = t.data.col(xcols[k]);
  if (t.has("y")) {
    d.y = t.data.col(t.column("y"));
  } else if (require_y) {
    throw DataError("missing response column 'y'");
  }
  return d;
}

inline Table from_dataset(const Eigen::MatrixXd& X, const Eigen::VectorXd* y) {
  Table t;
  for (Eigen::Index k = 0; k < X.cols(); ++k) t.names.push_back("x" + std::to_string(k + 1));
  t.data.resize(X.rows(), X.cols() + (y ? 1 : 0));
  t.data.leftCols(X.cols()) = X;
  if (y) {
    t.names.push_back("y");
    t.data.col(X.cols()) = *y;
  }
  return t;
}

}  // namespace lagp
