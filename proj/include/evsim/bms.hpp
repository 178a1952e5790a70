#pragma once

#include <algorithm>
#include <cmath>

#include "evsim/aging.hpp"
#include "evsim/param_store.hpp"

namespace evsim {

struct BmsLimits {
  double soc_min = 0.032;
  double soc_max = 0.953;
  double v_cell_min = 3.0;
  double v_cell_max = 4.2;
  double t_min = -25.0;
  double t_max = 55.0;
  double max_current = 104.0;  // A, 2 C of the 52 Ah cell
  double cv_taper_floor = 2.6;  // A; charging at the voltage limit stops below this
};

// The CV limiter lands on v_cell_max up to rounding.
inline constexpr double kVoltageLimitTolerance = 1e-3;  // V per cell

enum class GateReason { None, SocHigh, SocLow, VoltageHigh, VoltageLow, TemperatureFault, CurrentLimit };

inline const char* to_string(GateReason r) {
  switch (r) {
    case GateReason::None: return "None";
    case GateReason::SocHigh: return "SocHigh";
    case GateReason::SocLow: return "SocLow";
    case GateReason::VoltageHigh: return "VoltageHigh";
    case GateReason::VoltageLow: return "VoltageLow";
    case GateReason::TemperatureFault: return "TemperatureFault";
    case GateReason::CurrentLimit: return "CurrentLimit";
  }
  return "?";
}

struct GateResult {
  double allowed_current = 0.0;
  GateReason reason = GateReason::None;
  bool heating_required = false;
};

/// Applies the BMS envelope to a requested cell current (positive = charge).
/// The result has the same sign as the request or is zero.
inline GateResult gate_current(double requested_current, double soc, double v_cell, double t_pack,
                               const BmsLimits& limits) {
  GateResult out{requested_current, GateReason::None, false};
  const bool charging = requested_current > 0.0;
  const bool discharging = requested_current < 0.0;
  out.heating_required = charging && t_pack < 0.0;

  if (t_pack < limits.t_min || t_pack > limits.t_max) {
    out.allowed_current = 0.0;
    out.reason = GateReason::TemperatureFault;
    return out;
  }
  if (charging) {
    if (soc >= limits.soc_max) return {0.0, GateReason::SocHigh, out.heating_required};
    if (v_cell >= limits.v_cell_max - kVoltageLimitTolerance && requested_current <= limits.cv_taper_floor) {
      return {0.0, GateReason::VoltageHigh, out.heating_required};
    }
  }
  if (discharging) {
    if (soc <= limits.soc_min) return {0.0, GateReason::SocLow, false};
    if (v_cell <= limits.v_cell_min) return {0.0, GateReason::VoltageLow, false};
  }
  if (std::fabs(requested_current) > limits.max_current) {
    out.allowed_current = std::copysign(limits.max_current, requested_current);
    out.reason = GateReason::CurrentLimit;
  }
  return out;
}

/// Charge available between the SOC limits (Ah).
inline double usable_capacity(const BmsLimits& limits, const CellParameterSet& params, const AgingState& aging) {
  return std::max(0.0, limits.soc_max - limits.soc_min) * params.nominal_capacity_ah * aging.c_norm;
}

}  // namespace evsim
