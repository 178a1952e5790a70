#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "evsim/table.hpp"

namespace evsim {

/// Full electrical parameterization of one cell, pack scaling included.
struct CellParameterSet {
  ParamGrid ocv;    // V
  ParamGrid r_ser;  // Ω
  ParamGrid r1;     // Ω
  ParamGrid r2;     // Ω
  ParamGrid c1;     // F
  ParamGrid c2;     // F
  double nominal_capacity_ah = 52.0;
  double v_min = 3.0;
  double v_max = 4.2;
  int n_series = 93;
};

/// File name of every shipped table, in load order.
inline constexpr const char* kParameterFiles[] = {"ocv.csv", "r_ser.csv", "r1.csv", "r2.csv", "c1.csv", "c2.csv"};

/// Display name of a parameter file ("r_ser.csv" -> "R_ser").
inline const char* parameter_label(std::string_view file) {
  if (file == "ocv.csv") return "OCV";
  if (file == "r_ser.csv") return "R_ser";
  if (file == "r1.csv") return "R_1";
  if (file == "r2.csv") return "R_2";
  if (file == "c1.csv") return "C_1";
  if (file == "c2.csv") return "C_2";
  return "unknown";
}

/// Loads the six SOC × temperature tables from a directory. SOC rows are
/// stored in percent on disk and converted to fractions.
inline CellParameterSet load_parameter_set(const std::filesystem::path& directory) {
  auto load = [&](const char* name) {
    const auto path = directory / name;
    if (!std::filesystem::exists(path)) {
      throw DataError(path.string(), 0, std::string("missing ") + parameter_label(name) + " table");
    }
    return read_matrix_csv(path, 100.0, 1.0);
  };
  CellParameterSet set;
  set.ocv = load("ocv.csv");
  set.r_ser = load("r_ser.csv");
  set.r1 = load("r1.csv");
  set.r2 = load("r2.csv");
  set.c1 = load("c1.csv");
  set.c2 = load("c2.csv");
  return set;
}

/// Parameters evaluated at one operating point.
struct CellParameters {
  double ocv = 0.0;
  double r_ser = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double tau1() const noexcept { return r1 * c1; }
  double tau2() const noexcept { return r2 * c2; }
};

inline CellParameters lookup(const CellParameterSet& set, double soc, double temp_c) {
  return {interpolate(set.ocv, soc, temp_c), interpolate(set.r_ser, soc, temp_c), interpolate(set.r1, soc, temp_c),
          interpolate(set.r2, soc, temp_c),  interpolate(set.c1, soc, temp_c),    interpolate(set.c2, soc, temp_c)};
}

enum class Severity { Error, Info };

enum class FindingKind {
  TauOrdering,     // τ1 ≥ τ2 at a node
  NonPositive,     // R or C ≤ 0
  OcvNonMonotone,  // OCV drops with SOC by more than the tolerance
  OcvOutOfRange,   // OCV outside the cell voltage window
  Outlier,         // value off by more than a decade from its neighbours
  TauOutOfBand,    // τ outside its expected decade
  ShapeMismatch,   // impedance grids do not share breakpoints
};

struct Finding {
  Severity severity = Severity::Error;
  FindingKind kind = FindingKind::NonPositive;
  std::string parameter;
  double soc = 0.0;
  double temp_c = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  /// True when no Error finding is present; informational findings are allowed.
  bool ok() const {
    return std::none_of(findings.begin(), findings.end(),
                        [](const Finding& f) { return f.severity == Severity::Error; });
  }

  std::size_t count(FindingKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [kind](const Finding& f) { return f.kind == kind; }));
  }

  std::size_t errors() const {
    return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(),
                                                  [](const Finding& f) { return f.severity == Severity::Error; }));
  }
};

struct ValidationOptions {
  double ocv_monotone_tolerance_v = 1e-3;
  double outlier_factor = 10.0;
  double tau1_band_lo = 1e-2, tau1_band_hi = 1e-1;
  double tau2_band_lo = 1e1, tau2_band_hi = 1e2;
};

namespace detail {

inline void add_finding(ValidationReport& report, Severity severity, FindingKind kind, std::string parameter,
                        double soc, double temp, std::string message) {
  report.findings.push_back({severity, kind, std::move(parameter), soc, temp, std::move(message)});
}

inline std::string node_text(double soc, double temp) {
  std::ostringstream os;
  os << "(SOC " << soc * 100.0 << " %, " << temp << " °C)";
  return os.str();
}

inline bool same_axes(const ParamGrid& a, const ParamGrid& b) {
  return a.row_keys == b.row_keys && a.col_keys == b.col_keys;
}

inline void check_positive(ValidationReport& report, const ParamGrid& g, const char* name) {
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) {
      if (!(g.at(r, c) > 0.0)) {
        add_finding(report, Severity::Error, FindingKind::NonPositive, name, g.row_keys[r], g.col_keys[c],
                    std::string(name) + " non-positive at " + node_text(g.row_keys[r], g.col_keys[c]));
      }
    }
  }
}

// Flags nodes more than a decade away from the median of their 4-neighbourhood.
inline void check_outliers(ValidationReport& report, const ParamGrid& g, const char* name, double factor) {
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) {
      std::vector<double> nb;
      if (r > 0) nb.push_back(g.at(r - 1, c));
      if (r + 1 < g.rows()) nb.push_back(g.at(r + 1, c));
      if (c > 0) nb.push_back(g.at(r, c - 1));
      if (c + 1 < g.cols()) nb.push_back(g.at(r, c + 1));
      if (nb.size() < 2) continue;
      std::sort(nb.begin(), nb.end());
      const std::size_t m = nb.size() / 2;
      const double median = nb.size() % 2 ? nb[m] : 0.5 * (nb[m - 1] + nb[m]);
      const double v = g.at(r, c);
      if (median > 0.0 && v > 0.0 && (v * factor < median || v > median * factor)) {
        add_finding(report, Severity::Info, FindingKind::Outlier, name, g.row_keys[r], g.col_keys[c],
                    std::string(name) + " at " + node_text(g.row_keys[r], g.col_keys[c]) +
                        " is more than a decade from its neighbours");
      }
    }
  }
}

}  // namespace detail

/// Physical-consistency scan over every grid node.
inline ValidationReport validate_parameter_set(const CellParameterSet& set, const ValidationOptions& opt = {}) {
  ValidationReport report;
  using detail::add_finding;
  using detail::node_text;

  const std::pair<const ParamGrid*, const char*> impedance[] = {
      {&set.r_ser, "R_ser"}, {&set.r1, "R_1"}, {&set.r2, "R_2"}, {&set.c1, "C_1"}, {&set.c2, "C_2"}};
  for (const auto& [grid, name] : impedance) {
    detail::check_positive(report, *grid, name);
    detail::check_outliers(report, *grid, name, opt.outlier_factor);
  }

  // OCV: window and monotonicity in SOC at fixed temperature.
  const auto& ocv = set.ocv;
  for (std::size_t c = 0; c < ocv.cols(); ++c) {
    for (std::size_t r = 0; r < ocv.rows(); ++r) {
      // Guard rows (-5 % / 105 %) may sit on the limits, hence inclusive bounds.
      const double v = ocv.at(r, c);
      if (v < set.v_min || v > set.v_max) {
        add_finding(report, Severity::Error, FindingKind::OcvOutOfRange, "OCV", ocv.row_keys[r], ocv.col_keys[c],
                    "OCV outside cell window at " + node_text(ocv.row_keys[r], ocv.col_keys[c]));
      }
      if (r > 0 && ocv.at(r, c) < ocv.at(r - 1, c) - opt.ocv_monotone_tolerance_v) {
        add_finding(report, Severity::Error, FindingKind::OcvNonMonotone, "OCV", ocv.row_keys[r], ocv.col_keys[c],
                    "OCV decreases with SOC at " + node_text(ocv.row_keys[r], ocv.col_keys[c]));
      }
    }
  }

  // Time constants. Evaluated on the R_1 grid nodes; the other impedance
  // grids are interpolated there (exact when the axes coincide).
  for (const auto& [grid, name] : impedance) {
    if (!detail::same_axes(*grid, set.r1)) {
      add_finding(report, Severity::Info, FindingKind::ShapeMismatch, name, 0.0, 0.0,
                  std::string(name) + " breakpoints differ from R_1; τ checked on R_1 nodes");
    }
  }
  const auto& g = set.r1;
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) {
      const double soc = g.row_keys[r];
      const double temp = g.col_keys[c];
      const auto p = lookup(set, soc, temp);
      const double tau1 = p.tau1();
      const double tau2 = p.tau2();
      if (!(tau1 < tau2)) {
        add_finding(report, Severity::Error, FindingKind::TauOrdering, "tau", soc, temp,
                    "tau1 >= tau2 at " + node_text(soc, temp));
      }
      if (tau1 < opt.tau1_band_lo || tau1 > opt.tau1_band_hi) {
        add_finding(report, Severity::Info, FindingKind::TauOutOfBand, "tau1", soc, temp,
                    "tau1 = " + std::to_string(tau1) + " s outside its decade at " + node_text(soc, temp));
      }
      if (tau2 < opt.tau2_band_lo || tau2 > opt.tau2_band_hi) {
        add_finding(report, Severity::Info, FindingKind::TauOutOfBand, "tau2", soc, temp,
                    "tau2 = " + std::to_string(tau2) + " s outside its decade at " + node_text(soc, temp));
      }
    }
  }
  return report;
}

/// Median of a time constant over every node of the R_1 grid.
inline double median_time_constant(const CellParameterSet& set, int which) {
  std::vector<double> taus;
  for (double soc : set.r1.row_keys) {
    for (double temp : set.r1.col_keys) {
      const auto p = lookup(set, soc, temp);
      taus.push_back(which == 1 ? p.tau1() : p.tau2());
    }
  }
  if (taus.empty()) return std::nan("");
  std::sort(taus.begin(), taus.end());
  const std::size_t m = taus.size() / 2;
  return taus.size() % 2 ? taus[m] : 0.5 * (taus[m - 1] + taus[m]);
}

}  // namespace evsim
