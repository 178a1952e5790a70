#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "evsim/engine.hpp"
#include "evsim/metrics.hpp"

namespace evsim {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  const int n = std::snprintf(buf, sizeof buf, fmt, args...);
  return std::string(buf, static_cast<std::size_t>(std::max(0, std::min(n, static_cast<int>(sizeof buf) - 1))));
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ReportError("cannot write " + path.string());
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw ReportError("write failed: " + path.string());
}

}  // namespace detail

/// Fixed-precision rows, so identical runs give identical bytes.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << kTrajectoryHeader << '\n';
  for (const auto& r : trajectory) {
    out << detail::format("%.3f,%.9f,%.6f,%.4f,%.6f,%.6f,%.3f,%.3f,%.9f,%.9f,%.6f,%u\n", r.t, r.soc, r.v_cell,
                          r.v_pack, r.i_dc, r.t_pack, r.p_ac, r.p_dc, r.c_norm, r.r_norm, r.eqfc, r.flags);
  }
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
  auto out = detail::open_output(path);
  write_trajectory_csv(out, trajectory);
  detail::finish(out, path);
}

inline void write_summary(std::ostream& out, const SimulationResult& result,
                          const std::optional<ValidationMetrics>& metrics) {
  const auto& a = result.aging;
  const auto& e = result.totals;
  auto kv = [&](const char* key, double v) { out << key << '=' << detail::format("%.9g", v) << '\n'; };
  out << "steps=" << result.trajectory.size() << '\n';
  if (!result.trajectory.empty()) {
    kv("t_start_s", result.trajectory.front().t);
    kv("t_end_s", result.trajectory.back().t);
  }
  kv("final_soc", result.ecm.soc);
  kv("final_t_pack_c", result.thermal.t_pack);
  kv("charge_in_ah", e.charge_in_ah);
  kv("charge_out_ah", e.charge_out_ah);
  kv("ac_energy_kwh", e.ac_energy_kwh);
  kv("dc_energy_in_kwh", e.dc_energy_in_kwh);
  kv("dc_energy_out_kwh", e.dc_energy_out_kwh);
  kv("stored_energy_in_kwh", e.stored_energy_in_kwh);
  kv("heat_in_kwh", e.heat_in_kwh);
  kv("c_norm", a.c_norm);
  kv("r_norm", a.r_norm);
  kv("eqfc", a.eqfc);
  kv("elapsed_days", a.elapsed_days);
  kv("calendar_fade", a.calendar_fade);
  kv("cycle_fade", a.cycle_fade);
  kv("calendar_growth", a.calendar_growth);
  kv("cycle_growth", a.cycle_growth);
  out << "eol_status=" << to_string(result.eol()) << '\n';
  if (metrics) {
    kv("rmse_cell_voltage_mv", metrics->rmse_cell_voltage_mv);
    kv("max_abs_error_cell_voltage_mv", metrics->max_abs_error_cell_voltage_mv);
    kv("rmse_pack_temp_k", metrics->rmse_pack_temp_k);
    kv("max_abs_error_pack_temp_k", metrics->max_abs_error_pack_temp_k);
    kv("metrics_charge_ah", metrics->charge_ah);
    kv("metrics_energy_kwh", metrics->energy_kwh);
    kv("metrics_duration_min", metrics->duration_min);
    out << "metrics_samples=" << metrics->samples << '\n';
  }
}

inline void write_metrics(std::ostream& out, const ValidationMetrics& m) {
  auto kv = [&](const char* key, double v) { out << key << '=' << detail::format("%.9g", v) << '\n'; };
  kv("rmse_cell_voltage_mv", m.rmse_cell_voltage_mv);
  kv("max_abs_error_cell_voltage_mv", m.max_abs_error_cell_voltage_mv);
  kv("rmse_pack_temp_k", m.rmse_pack_temp_k);
  kv("max_abs_error_pack_temp_k", m.max_abs_error_pack_temp_k);
  kv("charge_ah", m.charge_ah);
  kv("energy_kwh", m.energy_kwh);
  kv("duration_min", m.duration_min);
  out << "samples=" << m.samples << '\n';
}

/// Writes trajectory.csv and summary.txt into out_dir (created if needed).
inline void emit_report(const SimulationResult& result, const std::optional<ValidationMetrics>& metrics,
                        const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ReportError("cannot create " + out_dir.string() + ": " + ec.message());
  write_trajectory_csv(out_dir / "trajectory.csv", result.trajectory);
  const auto summary_path = out_dir / "summary.txt";
  auto out = detail::open_output(summary_path);
  write_summary(out, result, metrics);
  detail::finish(out, summary_path);
}

}  // namespace evsim
