#pragma once

// Lumped single-node pack thermal model: convection to ambient plus an
// optional liquid loop whose coolant sits at ambient temperature.

#include <cmath>
#include <stdexcept>
#include <string>

namespace evsim {

enum class ThermalMode { EVOperation, LabPackTest };

struct ThermalParams {
  ThermalMode mode = ThermalMode::EVOperation;
  double c_pack = 17120.0;  // J/K
  double alpha_x = 0.726;   // W/K
  double alpha_y = 3.470;
  double alpha_z = 1.383;
  double rho_coolant = 1080.0;  // kg/m³
  double c_coolant = 3320.0;    // J/(kg·K)
  double flow_per_degree = 1.513e-5 / 45.0;  // m³/(s·°C)

  static ThermalParams defaults(ThermalMode mode) {
    ThermalParams p;
    p.mode = mode;
    if (mode == ThermalMode::LabPackTest) {
      p.alpha_x = 0.472;
      p.alpha_y = 2.863;
      p.alpha_z = 0.899;
    }
    return p;
  }

  double alpha_sum() const noexcept { return alpha_x + alpha_y + alpha_z; }

  /// The lab pack test ran with the vehicle's cooling loop switched off.
  bool has_liquid_cooling() const noexcept { return mode == ThermalMode::EVOperation; }
};

struct ThermalState {
  double t_pack = 25.0;  // °C
};

inline constexpr double kPermissibleTempMin = -25.0;
inline constexpr double kPermissibleTempMax = 55.0;

inline bool within_permissible_envelope(const ThermalState& s) {
  return s.t_pack >= kPermissibleTempMin && s.t_pack <= kPermissibleTempMax;
}

/// Heat leaving the pack by convection (W).
inline double convection_power(double t_pack, double t_ambient, const ThermalParams& p) {
  return p.alpha_sum() * (t_pack - t_ambient);
}

/// Coolant volume flow (m³/s), linear in the pack temperature in °C.
inline double coolant_flow_rate(double t_pack, const ThermalParams& p = {}) {
  return std::fabs(t_pack * p.flow_per_degree);
}

/// Heat removed by the liquid loop (W). Negative when ambient is warmer.
inline double cooling_power(double t_pack, double t_ambient, const ThermalParams& p) {
  return (t_pack - t_ambient) * p.rho_coolant * p.c_coolant * coolant_flow_rate(t_pack, p);
}

/// Largest explicit-Euler step that cannot overshoot ambient at the given
/// pack temperature.
inline double max_stable_dt(double t_pack, const ThermalParams& p, bool cooling_active) {
  double conductance = p.alpha_sum();
  if (cooling_active) conductance += p.rho_coolant * p.c_coolant * coolant_flow_rate(t_pack, p);
  return p.c_pack / conductance;
}

/// One explicit-Euler step of C·dT/dt = Q_gen − Q_conv − Q_cool. While
/// charging the pack is held at or above 0 °C (coolant heater).
inline ThermalState step_thermal(const ThermalState& state, const ThermalParams& p, double q_gen, double t_ambient,
                                 double dt, bool cooling_active, bool charging) {
  if (!std::isfinite(state.t_pack) || !std::isfinite(q_gen) || !std::isfinite(t_ambient)) {
    throw std::domain_error("step_thermal: non-finite input");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("step_thermal: dt must be positive");
  cooling_active = cooling_active && p.has_liquid_cooling();
  if (dt > max_stable_dt(state.t_pack, p, cooling_active)) {
    throw std::invalid_argument("step_thermal: dt " + std::to_string(dt) + " s exceeds the stability bound");
  }
  double q_diss = convection_power(state.t_pack, t_ambient, p);
  if (cooling_active) q_diss += cooling_power(state.t_pack, t_ambient, p);

  ThermalState next{state.t_pack + dt * (q_gen - q_diss) / p.c_pack};
  if (charging && next.t_pack < 0.0) next.t_pack = 0.0;
  if (!std::isfinite(next.t_pack)) throw std::domain_error("step_thermal: non-finite temperature");
  return next;
}

inline const char* to_string(ThermalMode m) {
  return m == ThermalMode::EVOperation ? "ev_operation" : "lab_pack_test";
}

}  // namespace evsim
