#pragma once

// Deviation metrics between a simulated and a reference trajectory.

#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "evsim/engine.hpp"
#include "evsim/table.hpp"

namespace evsim {

struct ValidationMetrics {
  double rmse_cell_voltage_mv = 0.0;
  double max_abs_error_cell_voltage_mv = 0.0;
  double rmse_pack_temp_k = 0.0;
  double max_abs_error_pack_temp_k = 0.0;
  double charge_ah = 0.0;   // signed, positive = into the battery
  double energy_kwh = 0.0;  // signed, DC side
  double duration_min = 0.0;
  std::size_t samples = 0;
};

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Compares sim against reference at the sim timestamps. The reference is
/// resampled by zero-order hold; sim samples outside the reference span are
/// skipped. Charge and energy integrate the aligned sim samples.
inline ValidationMetrics compute_metrics(const Trajectory& sim, const Trajectory& reference) {
  for (const auto* tr : {&sim, &reference}) {
    for (std::size_t i = 1; i < tr->size(); ++i) {
      if (!((*tr)[i].t > (*tr)[i - 1].t)) throw MetricsError("compute_metrics: timestamps must strictly increase");
    }
  }
  ValidationMetrics m;
  if (sim.empty() || reference.empty()) throw MetricsError("compute_metrics: no overlapping samples");

  const double eps = 1e-9;
  const double ref_begin = reference.front().t - eps;
  const double ref_end = reference.back().t + eps;
  double sq_v = 0.0, sq_t = 0.0;
  const TrajectoryRecord* prev = nullptr;
  double first_t = 0.0, last_t = 0.0;
  std::size_t j = 0;

  for (const auto& s : sim) {
    if (s.t < ref_begin || s.t > ref_end) continue;
    while (j + 1 < reference.size() && reference[j + 1].t <= s.t + eps) ++j;
    const auto& r = reference[j];
    const double ev = (s.v_cell - r.v_cell) * 1000.0;
    const double et = s.t_pack - r.t_pack;
    sq_v += ev * ev;
    sq_t += et * et;
    m.max_abs_error_cell_voltage_mv = std::max(m.max_abs_error_cell_voltage_mv, std::fabs(ev));
    m.max_abs_error_pack_temp_k = std::max(m.max_abs_error_pack_temp_k, std::fabs(et));
    if (prev) {
      const double dt = s.t - prev->t;
      m.charge_ah += 0.5 * (s.i_dc + prev->i_dc) * dt / 3600.0;
      m.energy_kwh += 0.5 * (s.p_dc + prev->p_dc) * dt / 3.6e6;
    } else {
      first_t = s.t;
    }
    last_t = s.t;
    prev = &s;
    ++m.samples;
  }
  if (m.samples == 0) throw MetricsError("compute_metrics: no overlapping samples");
  m.rmse_cell_voltage_mv = std::sqrt(sq_v / static_cast<double>(m.samples));
  m.rmse_pack_temp_k = std::sqrt(sq_t / static_cast<double>(m.samples));
  // Rounding can push the root mean square a few ulps above the maximum.
  m.rmse_cell_voltage_mv = std::min(m.rmse_cell_voltage_mv, m.max_abs_error_cell_voltage_mv);
  m.rmse_pack_temp_k = std::min(m.rmse_pack_temp_k, m.max_abs_error_pack_temp_k);
  m.duration_min = (last_t - first_t) / 60.0;
  return m;
}

inline constexpr std::string_view kTrajectoryHeader =
    "t_s,soc,v_cell_v,v_pack_v,i_dc_a,t_pack_c,p_ac_w,p_dc_w,c_norm,r_norm,eqfc,flags";

/// Reads a trajectory file. Columns are located by header name; only t_s,
/// v_cell_v and t_pack_c are required, so measured references with fewer
/// columns are accepted.
inline Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  const std::string file = path.string();
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw DataError(file, 0, "empty trajectory (header missing)");
  const auto header = detail::split_csv(lines.front().second);
  auto column = [&](std::string_view name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int c_t = column("t_s"), c_v = column("v_cell_v"), c_temp = column("t_pack_c");
  if (c_t < 0 || c_v < 0 || c_temp < 0) throw DataError(file, lines.front().first, "header needs t_s, v_cell_v, t_pack_c");
  const int c_soc = column("soc"), c_vp = column("v_pack_v"), c_i = column("i_dc_a"), c_pac = column("p_ac_w"),
            c_pdc = column("p_dc_w"), c_cn = column("c_norm"), c_rn = column("r_norm"), c_eq = column("eqfc"),
            c_fl = column("flags");

  Trajectory out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [number, text] = lines[li];
    const auto cells = detail::split_csv(text);
    if (cells.size() != header.size()) throw DataError(file, number, "row length differs from header");
    auto get = [&](int c, double fallback) {
      if (c < 0) return fallback;
      double v = 0.0;
      if (!detail::parse_double(cells[static_cast<std::size_t>(c)], v)) {
        throw DataError(file, number, "non-numeric cell '" + std::string(cells[static_cast<std::size_t>(c)]) + "'");
      }
      return v;
    };
    TrajectoryRecord r;
    r.t = get(c_t, 0.0);
    r.soc = get(c_soc, 0.0);
    r.v_cell = get(c_v, 0.0);
    r.v_pack = get(c_vp, 0.0);
    r.i_dc = get(c_i, 0.0);
    r.t_pack = get(c_temp, 0.0);
    r.p_ac = get(c_pac, 0.0);
    r.p_dc = get(c_pdc, 0.0);
    r.c_norm = get(c_cn, 1.0);
    r.r_norm = get(c_rn, 1.0);
    r.eqfc = get(c_eq, 0.0);
    r.flags = static_cast<unsigned>(get(c_fl, 0.0));
    out.push_back(r);
  }
  return out;
}

}  // namespace evsim
