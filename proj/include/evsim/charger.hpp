#pragma once

// On-board AC charger: IEC 61851-1 set-point quantization, ramp dynamics
// after a set-point change, AC->DC efficiency and the CC-CV current limit.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "evsim/cell_electrical.hpp"
#include "evsim/table.hpp"

namespace evsim {

enum class ChargerMode { OnePhase, ThreePhase };

inline const char* to_string(ChargerMode m) { return m == ChargerMode::OnePhase ? "one_phase" : "three_phase"; }

inline PiecewiseLinear default_efficiency_curve() {
  // 2.9 kW anchor interpolated between the two measured full-charge values.
  return PiecewiseLinear({{1800.0, 0.73}, {2900.0, 0.752619}, {11040.0, 0.92}});
}

inline PiecewiseLinear default_ramp_curve() { return PiecewiseLinear({{0.0, 0.0}, {10.0, 0.8}, {52.0, 1.0}}); }

struct ChargerConfig {
  ChargerMode mode = ChargerMode::ThreePhase;
  double grid_voltage = 230.0;  // V, phase voltage
  double min_current = 6.0;     // A per phase
  double max_current = 16.0;
  double current_step = 1.0;
  std::vector<double> one_phase_setpoints{1800.0, 2900.0};  // W
  PiecewiseLinear efficiency_curve = default_efficiency_curve();
  PiecewiseLinear ramp_curve = default_ramp_curve();  // normalized, t in s
  double ramp_up_time = 52.0;     // s until an upward command is met
  double ramp_down_time = 4.0;    // s until a downward command is met
  double start_dead_time = 2.0;   // s of no reaction when starting from 0 W
};

/// Every non-zero AC power the charger can be commanded to, ascending.
inline std::vector<double> achievable_setpoints(const ChargerConfig& config) {
  std::vector<double> out;
  if (config.mode == ChargerMode::OnePhase) {
    out = config.one_phase_setpoints;
    std::sort(out.begin(), out.end());
    return out;
  }
  const int steps = static_cast<int>(std::floor((config.max_current - config.min_current) / config.current_step + 1e-9));
  for (int k = 0; k <= steps; ++k) {
    const double amps = config.min_current + k * config.current_step;
    out.push_back(3.0 * config.grid_voltage * amps);
  }
  return out;
}

/// Largest achievable set-point not above the request; 0 W (off) when the
/// request is below the smallest one.
inline double quantize_setpoint(double requested_w, const ChargerConfig& config) {
  if (!(requested_w >= 0.0)) throw std::invalid_argument("quantize_setpoint: request must be >= 0");
  double best = 0.0;
  for (double p : achievable_setpoints(config)) {
    if (p <= requested_w) best = std::max(best, p);
  }
  return best;
}

enum class RampDirection { None, Up, Down };

struct ChargeControlState {
  double p_target = 0.0;      // W AC, quantized
  double p_at_command = 0.0;  // W AC when the last command was issued
  double t_since_command = 0.0;
  RampDirection direction = RampDirection::None;
};

/// Registers a new target. The ramp restarts from the power drawn right now.
inline ChargeControlState command_setpoint([[maybe_unused]] const ChargeControlState& state, double new_target_w,
                                           double current_power_w) {
  ChargeControlState next;
  next.p_target = new_target_w;
  next.p_at_command = current_power_w;
  next.t_since_command = 0.0;
  if (new_target_w > current_power_w) {
    next.direction = RampDirection::Up;
  } else if (new_target_w < current_power_w) {
    next.direction = RampDirection::Down;
  } else {
    next.direction = RampDirection::None;
  }
  return next;
}

/// Normalized upward progress at time t after a command. When starting
/// from 0 W the curve is compressed behind the dead time, so the target is
/// still met at exactly ramp_up_time.
inline double ramp_progress(double t, bool from_standstill, const ChargerConfig& config) {
  if (t >= config.ramp_up_time) return 1.0;
  if (t <= 0.0) return 0.0;
  if (!from_standstill || config.start_dead_time <= 0.0) return std::clamp(config.ramp_curve(t), 0.0, 1.0);
  const double dead = std::min(config.start_dead_time, config.ramp_up_time);
  if (t <= dead) return 0.0;
  const double tau = (t - dead) * config.ramp_up_time / (config.ramp_up_time - dead);
  return std::clamp(config.ramp_curve(tau), 0.0, 1.0);
}

/// AC power drawn at state.t_since_command.
inline double ramp_power(const ChargeControlState& state, const ChargerConfig& config) {
  const double t = state.t_since_command;
  switch (state.direction) {
    case RampDirection::Up: {
      if (t >= config.ramp_up_time) return state.p_target;
      const double progress = ramp_progress(t, state.p_at_command == 0.0, config);
      return state.p_at_command + (state.p_target - state.p_at_command) * progress;
    }
    case RampDirection::Down:
      return t >= config.ramp_down_time ? state.p_target : state.p_at_command;
    case RampDirection::None:
      break;
  }
  return state.p_target;
}

inline double charger_efficiency(double p_ac, const ChargerConfig& config) { return config.efficiency_curve(p_ac); }

inline double ac_to_dc(double p_ac, const ChargerConfig& config) {
  if (!(p_ac >= 0.0)) throw std::invalid_argument("ac_to_dc: AC power must be >= 0");
  return p_ac * charger_efficiency(p_ac, config);
}

/// Inverse of ac_to_dc. p·η(p) is strictly increasing for a non-decreasing
/// η, and quadratic on each segment of the curve.
inline double dc_to_ac(double p_dc, const ChargerConfig& config) {
  if (!(p_dc >= 0.0)) throw std::invalid_argument("dc_to_ac: DC power must be >= 0");
  if (p_dc == 0.0) return 0.0;
  const auto& pts = config.efficiency_curve.points();
  if (p_dc <= pts.front().first * pts.front().second) return p_dc / pts.front().second;
  if (p_dc >= pts.back().first * pts.back().second) return p_dc / pts.back().second;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto [x0, e0] = pts[i - 1];
    const auto [x1, e1] = pts[i];
    if (p_dc > x1 * e1) continue;
    // η(p) = e0 + s·(p − x0)  =>  s·p² + (e0 − s·x0)·p − p_dc = 0
    const double s = (e1 - e0) / (x1 - x0);
    const double b = e0 - s * x0;
    if (s == 0.0) return p_dc / b;
    const double disc = b * b + 4.0 * s * p_dc;
    // Numerically stable root of the positive branch.
    const double root = 2.0 * p_dc / (b + std::sqrt(disc));
    return root;
  }
  return p_dc / pts.back().second;
}

/// DC current command. Constant power below the voltage limit; once the
/// predicted pack voltage would exceed v_max_pack the current is cut back
/// to the value that lands exactly on the limit. Never negative.
inline double cc_cv_limit(double p_dc_request, double pack_voltage, double v_max_pack,
                          const VoltageResponse& pack_response) {
  if (!(pack_voltage > 0.0)) throw std::invalid_argument("cc_cv_limit: pack voltage must be positive");
  if (!(p_dc_request > 0.0)) return 0.0;
  double current = p_dc_request / pack_voltage;
  if (pack_response.at(current) > v_max_pack) {
    current = pack_response.resistance > 0.0
                  ? (v_max_pack - pack_response.open_circuit) / pack_response.resistance
                  : 0.0;
  }
  return std::max(0.0, current);
}

}  // namespace evsim
