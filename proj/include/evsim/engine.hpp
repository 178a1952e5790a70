#pragma once

// Fixed-step scenario loop coupling the cell, thermal, aging, charger and
// BMS models.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "evsim/aging.hpp"
#include "evsim/bms.hpp"
#include "evsim/cell_electrical.hpp"
#include "evsim/charger.hpp"
#include "evsim/config.hpp"
#include "evsim/pack_thermal.hpp"
#include "evsim/profile.hpp"
#include "evsim/strategy.hpp"

namespace evsim {

/// Bits of TrajectoryRecord::flags.
namespace flag {
inline constexpr unsigned kSocSaturated = 1u << 0;
inline constexpr unsigned kBmsGated = 1u << 1;
inline constexpr unsigned kHeating = 1u << 2;
inline constexpr unsigned kCvActive = 1u << 3;
inline constexpr unsigned kOutOfEnvelope = 1u << 4;
inline constexpr unsigned kCooling = 1u << 5;
inline constexpr unsigned kCharging = 1u << 6;
inline constexpr unsigned kDriving = 1u << 7;
}  // namespace flag

/// State at the end of one step.
struct TrajectoryRecord {
  double t = 0.0;       // s
  double soc = 0.0;
  double v_cell = 0.0;  // V
  double v_pack = 0.0;  // V
  double i_dc = 0.0;    // A, positive = charging
  double t_pack = 0.0;  // °C
  double p_ac = 0.0;    // W drawn from the grid
  double p_dc = 0.0;    // W at the battery terminals, signed like i_dc
  double c_norm = 1.0;
  double r_norm = 1.0;
  double eqfc = 0.0;
  unsigned flags = 0;
};

using Trajectory = std::vector<TrajectoryRecord>;

struct EnergyTotals {
  double charge_in_ah = 0.0;
  double charge_out_ah = 0.0;
  double ac_energy_kwh = 0.0;
  double dc_energy_in_kwh = 0.0;
  double dc_energy_out_kwh = 0.0;
  // Charging steps only: energy stored at the open-circuit voltage and
  // heat dissipated in the cell resistances.
  double stored_energy_in_kwh = 0.0;
  double heat_in_kwh = 0.0;
};

struct SimulationResult {
  Trajectory trajectory;
  AgingState aging;
  EcmState ecm;
  ThermalState thermal;
  EnergyTotals totals;

  EolStatus eol() const { return eol_check(aging); }
};

class SimulationError : public std::runtime_error {
 public:
  SimulationError(std::size_t step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

namespace detail {

inline constexpr double kJoulePerKwh = 3.6e6;

// Calendar aging sees interval means of SOC and temperature.
struct CalendarAccumulator {
  double time = 0.0;
  double soc_time = 0.0;
  double temp_time = 0.0;

  void add(double soc, double temp, double dt) {
    time += dt;
    soc_time += soc * dt;
    temp_time += temp * dt;
  }
  void apply(AgingState& aging, const CalendarCoeffGrid& coeffs) {
    if (time <= 0.0) return;
    aging = calendar_step(std::move(aging), soc_time / time, temp_time / time, time / 86400.0, coeffs);
    *this = {};
  }
};

}  // namespace detail

inline SimulationResult run_scenario(const ScenarioConfig& cfg, const ScenarioProfile& profile,
                                     const Strategy& strategy) {
  validate_config(cfg);
  validate_profile(profile);
  if (!strategy) throw ConfigError("run_scenario: no strategy");

  const auto& plant = *cfg.plant;
  const auto& cell = plant.cell;
  const double n_series = cell.n_series;
  const double v_max_pack = cfg.v_max_pack();

  SimulationResult out;
  out.aging = make_aging_state(cfg.initial.c_norm, cfg.initial.r_norm);
  out.ecm.soc = cfg.initial.soc;
  out.thermal.t_pack = cfg.initial.t_pack.value_or(profile.records.empty() ? 25.0 : profile.records.front().ambient_c);
  if (profile.empty()) return out;

  auto& aging = out.aging;
  auto& ecm = out.ecm;
  auto& thermal = out.thermal;
  auto& totals = out.totals;

  const double t0 = profile.start();
  const double t_end = profile.end();
  const double eps = 1e-9 * cfg.dt;
  out.trajectory.reserve(static_cast<std::size_t>(std::ceil((t_end - t0) / cfg.dt)) + 1);

  double v_cell_prev = rest_voltage(ecm, cell, thermal.t_pack);
  double p_ac_prev = 0.0;

  ChargerConfig charger = cfg.charger;
  std::vector<double> setpoints;
  ChargeControlState control;
  double last_poll = 0.0;
  bool poll_pending = true;

  detail::CalendarAccumulator calendar;
  if (cfg.aging_enabled) aging = cycle_accumulate(std::move(aging), ecm.soc, plant.cycle);

  std::size_t segment = 0;
  std::size_t active_segment = static_cast<std::size_t>(-1);
  const std::size_t last_segment = profile.records.size() - 2;

  for (std::size_t k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * cfg.dt;
    if (t >= t_end - eps) break;
    const double h = std::min(cfg.dt, t_end - t);

    try {
      while (segment < last_segment && profile.records[segment + 1].t <= t + eps) ++segment;
      const auto& rec = profile.records[segment];
      const bool plugged = rec.kind == SegmentKind::PluggedIn;

      if (segment != active_segment) {
        const bool was_plugged =
            active_segment != static_cast<std::size_t>(-1) && profile.records[active_segment].kind == SegmentKind::PluggedIn;
        active_segment = segment;
        if (plugged) {
          charger.mode = rec.charger_mode.value_or(cfg.charger.mode);
          setpoints = achievable_setpoints(charger);
          poll_pending = true;
          if (!was_plugged) {
            control = {};
            p_ac_prev = 0.0;
          }
        } else {
          control = {};
          p_ac_prev = 0.0;
        }
      }

      unsigned flags = 0;
      double current = 0.0;
      GateResult gate;

      const auto eff = effective_cell(cell, aging, ecm.soc, thermal.t_pack);
      const auto pack_response = voltage_response(ecm, eff, h).scaled(n_series);
      const double v_pack_prev = v_cell_prev * n_series;

      if (plugged) {
        if (poll_pending || t - last_poll >= cfg.control_interval - eps) {
          Observation obs{t, ecm.soc, thermal.t_pack, true, p_ac_prev, rec.value_w, setpoints};
          const double request = strategy(obs).requested_ac_power;
          if (!std::isfinite(request) || request < 0.0) {
            throw std::domain_error("strategy returned an invalid power request");
          }
          const double target = quantize_setpoint(request, charger);
          if (target != control.p_target) control = command_setpoint(control, target, p_ac_prev);
          last_poll = t;
          poll_pending = false;
        }
        const double p_dc_request = ac_to_dc(ramp_power(control, charger), charger);
        current = cc_cv_limit(p_dc_request, v_pack_prev, v_max_pack, pack_response);
        if (p_dc_request > 0.0 && current < p_dc_request / v_pack_prev) flags |= flag::kCvActive;
        gate = gate_current(current, ecm.soc, v_cell_prev, thermal.t_pack, cfg.bms);
      } else if (rec.kind == SegmentKind::Drive) {
        flags |= flag::kDriving;
        current = rec.value_w / v_pack_prev;
        if (current > 0.0) {
          const double limited = cc_cv_limit(rec.value_w, v_pack_prev, v_max_pack, pack_response);
          if (limited < current) flags |= flag::kCvActive;
          current = limited;
        }
        gate = gate_current(current, ecm.soc, v_cell_prev, thermal.t_pack, cfg.bms);
      } else {
        gate = gate_current(0.0, ecm.soc, v_cell_prev, thermal.t_pack, cfg.bms);
      }
      if (gate.reason != GateReason::None) flags |= flag::kBmsGated;
      if (gate.heating_required) flags |= flag::kHeating;
      current = gate.allowed_current;

      const auto step = step_ecm(ecm, cell, aging, current, thermal.t_pack, h);
      const auto& res = step.result;
      if (res.soc_saturated) flags |= flag::kSocSaturated;

      const bool charging = plugged && current > 0.0;
      if (charging) flags |= flag::kCharging;
      bool cooling = rec.kind == SegmentKind::Drive || charging;
      cooling = cooling && cfg.thermal.has_liquid_cooling() && thermal.t_pack > rec.ambient_c;
      if (cooling) flags |= flag::kCooling;

      auto next_thermal = step_thermal(thermal, cfg.thermal, res.heat_power * n_series, rec.ambient_c, h, cooling, charging);
      if (charging && next_thermal.t_pack <= 0.0) flags |= flag::kHeating;
      if (!within_permissible_envelope(next_thermal)) flags |= flag::kOutOfEnvelope;

      double p_dc = current * res.terminal_voltage_pack;
      double p_ac = 0.0;
      if (charging && p_dc > 0.0) p_ac = dc_to_ac(p_dc, charger);

      if (current > 0.0) {
        totals.charge_in_ah += current * h / 3600.0;
        totals.dc_energy_in_kwh += p_dc * h / detail::kJoulePerKwh;
        totals.stored_energy_in_kwh += n_series * current * eff.ocv * h / detail::kJoulePerKwh;
        totals.heat_in_kwh += n_series * res.heat_power * h / detail::kJoulePerKwh;
      } else if (current < 0.0) {
        totals.charge_out_ah -= current * h / 3600.0;
        totals.dc_energy_out_kwh -= p_dc * h / detail::kJoulePerKwh;
      }
      totals.ac_energy_kwh += p_ac * h / detail::kJoulePerKwh;

      ecm = step.state;
      thermal = next_thermal;
      v_cell_prev = res.terminal_voltage_cell;
      p_ac_prev = p_ac;
      if (plugged) control.t_since_command += h;

      if (cfg.aging_enabled) {
        aging = cycle_accumulate(std::move(aging), ecm.soc, plant.cycle);
        calendar.add(ecm.soc, thermal.t_pack, h);
        if (calendar.time >= cfg.aging_interval - eps) calendar.apply(aging, plant.calendar);
      }

      out.trajectory.push_back({t + h, ecm.soc, res.terminal_voltage_cell, res.terminal_voltage_pack, current,
                                thermal.t_pack, p_ac, p_dc, aging.c_norm, aging.r_norm, aging.eqfc, flags});
    } catch (const SimulationError&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationError(k, e.what());
    }
  }

  if (cfg.aging_enabled) {
    calendar.apply(aging, plant.calendar);
    aging = flush_cycles(std::move(aging), plant.cycle);
  }
  return out;
}

/// Runs with the profile's own plugged-in requests.
inline SimulationResult run_scenario(const ScenarioConfig& cfg, const ScenarioProfile& profile) {
  return run_scenario(cfg, profile, make_strategy("profile"));
}

}  // namespace evsim
