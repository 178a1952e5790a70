#pragma once

// Dual-polarization (2RC Thevenin) cell model, stepped with an exact hold
// of the current over each step. Charging current is positive.

#include <cmath>
#include <stdexcept>
#include <string>

#include "evsim/aging.hpp"
#include "evsim/param_store.hpp"

namespace evsim {

struct EcmState {
  double soc = 0.5;  // fraction of the effective (aged) capacity
  double u1 = 0.0;   // V across RC element 1
  double u2 = 0.0;   // V across RC element 2
};

struct ElectricalStepResult {
  double terminal_voltage_cell = 0.0;
  double terminal_voltage_pack = 0.0;
  double heat_power = 0.0;  // W per cell
  double soc_after = 0.0;
  bool soc_saturated = false;
};

struct EcmStep {
  EcmState state;
  ElectricalStepResult result;
};

/// Parameters after aging is applied, at one operating point.
struct EffectiveCell {
  double ocv = 0.0;
  double r_ser = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double capacity_ah = 0.0;
};

/// R_norm scales all three resistances; capacitances are unchanged, so the
/// time constants grow with the resistances.
inline EffectiveCell effective_cell(const CellParameterSet& params, const AgingState& aging, double soc, double temp_c) {
  const auto p = lookup(params, soc, temp_c);
  EffectiveCell e;
  e.ocv = p.ocv;
  e.r_ser = p.r_ser * aging.r_norm;
  e.r1 = p.r1 * aging.r_norm;
  e.r2 = p.r2 * aging.r_norm;
  e.tau1 = e.r1 * p.c1;
  e.tau2 = e.r2 * p.c2;
  e.capacity_ah = params.nominal_capacity_ah * aging.c_norm;
  return e;
}

/// Affine terminal-voltage response over the next step: V(I) = open_circuit + resistance·I.
/// Used by the charger and the BMS to anticipate the voltage a current will produce.
struct VoltageResponse {
  double open_circuit = 0.0;
  double resistance = 0.0;

  double at(double current) const noexcept { return open_circuit + resistance * current; }
  VoltageResponse scaled(double n) const noexcept { return {open_circuit * n, resistance * n}; }
};

inline VoltageResponse voltage_response(const EcmState& state, const EffectiveCell& cell, double dt) {
  const double e1 = std::exp(-dt / cell.tau1);
  const double e2 = std::exp(-dt / cell.tau2);
  return {cell.ocv + state.u1 * e1 + state.u2 * e2, cell.r_ser + cell.r1 * (1.0 - e1) + cell.r2 * (1.0 - e2)};
}

namespace detail {

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::domain_error(std::string("step_ecm: non-finite ") + what);
}

}  // namespace detail

/// Advances the cell by dt seconds at constant current. Parameters are
/// looked up at the start-of-step SOC.
inline EcmStep step_ecm(const EcmState& state, const CellParameterSet& params, const AgingState& aging,
                        double current, double temp_c, double dt) {
  detail::require_finite(current, "current");
  detail::require_finite(temp_c, "temperature");
  detail::require_finite(state.soc, "soc");
  detail::require_finite(state.u1, "u1");
  detail::require_finite(state.u2, "u2");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step_ecm: dt must be positive");

  const auto cell = effective_cell(params, aging, state.soc, temp_c);
  const double e1 = std::exp(-dt / cell.tau1);
  const double e2 = std::exp(-dt / cell.tau2);

  EcmStep out;
  out.state.u1 = state.u1 * e1 + cell.r1 * current * (1.0 - e1);
  out.state.u2 = state.u2 * e2 + cell.r2 * current * (1.0 - e2);

  double soc = state.soc + current * dt / (3600.0 * cell.capacity_ah);
  bool saturated = false;
  if (soc > 1.0) {
    soc = 1.0;
    saturated = true;
  } else if (soc < 0.0) {
    soc = 0.0;
    saturated = true;
  }
  out.state.soc = soc;

  auto& r = out.result;
  r.terminal_voltage_cell = cell.ocv + current * cell.r_ser + out.state.u1 + out.state.u2;
  r.terminal_voltage_pack = params.n_series * r.terminal_voltage_cell;
  r.heat_power = current * current * cell.r_ser + out.state.u1 * out.state.u1 / cell.r1 +
                 out.state.u2 * out.state.u2 / cell.r2;
  r.soc_after = soc;
  r.soc_saturated = saturated;

  detail::require_finite(r.terminal_voltage_cell, "terminal voltage");
  detail::require_finite(r.heat_power, "heat power");
  return out;
}

/// Terminal voltage at zero current.
inline double rest_voltage(const EcmState& state, const CellParameterSet& params, double temp_c) {
  return interpolate(params.ocv, state.soc, temp_c) + state.u1 + state.u2;
}

}  // namespace evsim
