#pragma once

// Lookup tables shared by every plant module: a 2-D breakpoint grid with
// clamped bilinear interpolation, a 1-D piecewise-linear curve, and the
// comma-separated readers for both on-disk layouts.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace evsim {

/// Malformed or missing data file. Carries the file and the 1-based row.
class DataError : public std::runtime_error {
 public:
  DataError(std::string file, std::size_t row, const std::string& what)
      : std::runtime_error(format(file, row, what)), file_(std::move(file)), row_(row) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t row() const noexcept { return row_; }

 private:
  static std::string format(const std::string& file, std::size_t row, const std::string& what) {
    if (row == 0) return file + ": " + what;
    return file + ":" + std::to_string(row) + ": " + what;
  }

  std::string file_;
  std::size_t row_;
};

/// 2-D table over (row key, column key). Values are row-major.
///
/// For the electrical parameters rows are SOC (fraction) and columns are
/// cell temperature (°C). The aging tables reuse the layout with other keys.
struct LookupTable2D {
  std::vector<double> row_keys;
  std::vector<double> col_keys;
  std::vector<double> values;

  std::size_t rows() const noexcept { return row_keys.size(); }
  std::size_t cols() const noexcept { return col_keys.size(); }

  double at(std::size_t r, std::size_t c) const { return values.at(r * cols() + c); }
  double& at(std::size_t r, std::size_t c) { return values.at(r * cols() + c); }
};

/// One SOC × temperature parameter table.
using ParamGrid = LookupTable2D;

namespace detail {

struct Bracket {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double weight = 0.0;  // fraction of the way from lo to hi
};

// Clamps x into the breakpoint hull and finds the enclosing segment.
inline Bracket bracket(std::span<const double> keys, double x) {
  const std::size_t n = keys.size();
  if (n <= 1 || x <= keys.front()) return {0, n > 1 ? 1u : 0u, 0.0};
  if (x >= keys.back()) return {n - 2, n - 1, 1.0};
  auto it = std::upper_bound(keys.begin(), keys.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - keys.begin());
  const std::size_t lo = hi - 1;
  return {lo, hi, (x - keys[lo]) / (keys[hi] - keys[lo])};
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

// Reads non-blank, non-comment lines together with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), 0, "cannot open file");
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    lines.emplace_back(number, std::string(t));
  }
  return lines;
}

inline void require_increasing(const std::vector<double>& keys, const std::string& file, std::size_t row,
                               const char* axis) {
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (!(keys[i] > keys[i - 1])) {
      throw DataError(file, row, std::string(axis) + " breakpoints not strictly increasing");
    }
  }
}

}  // namespace detail

/// Clamped bilinear interpolation. Throws std::domain_error on NaN input.
inline double interpolate(const LookupTable2D& table, double row_key, double col_key) {
  if (std::isnan(row_key) || std::isnan(col_key)) {
    throw std::domain_error("interpolate: NaN lookup coordinate");
  }
  const auto r = detail::bracket(table.row_keys, row_key);
  const auto c = detail::bracket(table.col_keys, col_key);
  const double v00 = table.at(r.lo, c.lo);
  const double v01 = table.at(r.lo, c.hi);
  const double v10 = table.at(r.hi, c.lo);
  const double v11 = table.at(r.hi, c.hi);
  // Written so that a zero weight contributes an exact zero: grid nodes come
  // back bit-for-bit.
  const double wr = r.weight;
  const double wc = c.weight;
  return (1.0 - wr) * ((1.0 - wc) * v00 + wc * v01) + wr * ((1.0 - wc) * v10 + wc * v11);
}

/// Reads a matrix file: first row holds the column keys (its first cell is a
/// free-form label), first column holds the row keys, the body the values.
/// Keys are divided by the given divisors, so percent keys can be stored as
/// fractions (35 / 100 rounds to the same double as the literal 0.35).
inline LookupTable2D read_matrix_csv(const std::filesystem::path& path, double row_divisor = 1.0,
                                     double col_divisor = 1.0) {
  const std::string file = path.string();
  const auto lines = detail::read_lines(path);
  if (lines.size() < 2) throw DataError(file, 0, "matrix needs a header row and at least one data row");

  LookupTable2D table;
  {
    const auto& [number, text] = lines.front();
    const auto cells = detail::split_csv(text);
    if (cells.size() < 2) throw DataError(file, number, "header row has no column breakpoints");
    for (std::size_t i = 1; i < cells.size(); ++i) {
      double v = 0.0;
      if (!detail::parse_double(cells[i], v)) {
        throw DataError(file, number, "non-numeric column breakpoint '" + std::string(cells[i]) + "'");
      }
      table.col_keys.push_back(v / col_divisor);
    }
    detail::require_increasing(table.col_keys, file, number, "column");
  }

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [number, text] = lines[li];
    const auto cells = detail::split_csv(text);
    if (cells.size() != table.cols() + 1) {
      throw DataError(file, number,
                      "row has " + std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(table.cols() + 1));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      double v = 0.0;
      if (!detail::parse_double(cells[i], v)) {
        throw DataError(file, number, "non-numeric cell '" + std::string(cells[i]) + "'");
      }
      if (i == 0) {
        table.row_keys.push_back(v / row_divisor);
      } else {
        table.values.push_back(v);
      }
    }
    if (table.rows() > 1 && !(table.row_keys.back() > table.row_keys[table.rows() - 2])) {
      throw DataError(file, number, "row breakpoints not strictly increasing");
    }
  }
  return table;
}

/// Piecewise-linear curve through anchor points, constant beyond the ends.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;

  explicit PiecewiseLinear(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("PiecewiseLinear: no anchor points");
    for (std::size_t i = 1; i < points_.size(); ++i) {
      if (!(points_[i].first > points_[i - 1].first)) {
        throw std::invalid_argument("PiecewiseLinear: abscissae not strictly increasing");
      }
    }
  }

  double operator()(double x) const {
    if (points_.empty()) throw std::logic_error("PiecewiseLinear: empty curve");
    if (std::isnan(x)) throw std::domain_error("PiecewiseLinear: NaN abscissa");
    if (x <= points_.front().first) return points_.front().second;
    if (x >= points_.back().first) return points_.back().second;
    auto it = std::upper_bound(points_.begin(), points_.end(), x,
                               [](double v, const auto& p) { return v < p.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    const double w = (x - x0) / (x1 - x0);
    return (1.0 - w) * y0 + w * y1;
  }

  const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }
  bool empty() const noexcept { return points_.empty(); }

 private:
  std::vector<std::pair<double, double>> points_;
};

/// Reads a two-column curve file (abscissa, value). A non-numeric first
/// line is treated as a header.
inline PiecewiseLinear read_curve_csv(const std::filesystem::path& path) {
  const std::string file = path.string();
  const auto lines = detail::read_lines(path);
  std::vector<std::pair<double, double>> points;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto& [number, text] = lines[li];
    const auto cells = detail::split_csv(text);
    double x = 0.0;
    double y = 0.0;
    const bool numeric = cells.size() == 2 && detail::parse_double(cells[0], x) && detail::parse_double(cells[1], y);
    if (!numeric) {
      if (li == 0) continue;
      throw DataError(file, number, "expected two numeric cells");
    }
    if (!points.empty() && !(x > points.back().first)) {
      throw DataError(file, number, "abscissa not strictly increasing");
    }
    points.emplace_back(x, y);
  }
  if (points.empty()) throw DataError(file, 0, "curve has no points");
  return PiecewiseLinear(std::move(points));
}

}  // namespace evsim
