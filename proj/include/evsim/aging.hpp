#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "evsim/rainflow.hpp"
#include "evsim/table.hpp"

namespace evsim {

/// Calendar aging rates. Rows are storage SOC (fraction), columns cell
/// temperature (°C); values are per day.
struct CalendarCoeffGrid {
  LookupTable2D alpha_c;  // capacity loss / day
  LookupTable2D alpha_r;  // resistance growth / day
};

/// Cycle aging rates. Rows are depth of discharge (fraction), columns mean
/// SOC (fraction); values are per equivalent full cycle.
struct CycleCoeffGrid {
  LookupTable2D beta_c;  // capacity loss / EQFC
  LookupTable2D beta_r;  // resistance growth / EQFC
};

inline constexpr double kEolCapacity = 0.8;
inline constexpr double kEolResistance = 2.0;

// c_norm floor keeping the effective capacity strictly positive.
inline constexpr double kMinCapacityFraction = 1e-3;

struct AgingState {
  double c_norm = 1.0;
  double r_norm = 1.0;
  double elapsed_days = 0.0;
  double eqfc = 0.0;

  // Contributions kept apart so calendar and cycle aging can be reported
  // (and checked) separately.
  double calendar_fade = 0.0;
  double cycle_fade = 0.0;
  double calendar_growth = 0.0;
  double cycle_growth = 0.0;

  // Aging the pack already carried at the start of the run.
  double initial_fade = 0.0;
  double initial_growth = 0.0;

  StreamingRainflow rainflow;
};

namespace detail {

inline void refresh_norms(AgingState& s) {
  s.c_norm = std::max(kMinCapacityFraction, 1.0 - s.initial_fade - (s.calendar_fade + s.cycle_fade));
  s.r_norm = 1.0 + s.initial_growth + (s.calendar_growth + s.cycle_growth);
}

}  // namespace detail

inline AgingState make_aging_state(double c_norm, double r_norm) {
  if (!(c_norm > 0.0 && c_norm <= 1.0)) throw std::invalid_argument("make_aging_state: c_norm must be in (0,1]");
  if (!(r_norm >= 1.0)) throw std::invalid_argument("make_aging_state: r_norm must be >= 1");
  AgingState s;
  s.initial_fade = 1.0 - c_norm;
  s.initial_growth = r_norm - 1.0;
  detail::refresh_norms(s);
  return s;
}

/// Linear-in-time calendar aging over dt_days at a fixed operating point.
inline AgingState calendar_step(AgingState state, double soc, double temp_c, double dt_days,
                                const CalendarCoeffGrid& coeffs) {
  if (!(dt_days >= 0.0)) throw std::invalid_argument("calendar_step: dt_days must be >= 0");
  const double ac = std::max(0.0, interpolate(coeffs.alpha_c, soc, temp_c));
  const double ar = std::max(0.0, interpolate(coeffs.alpha_r, soc, temp_c));
  state.calendar_fade += ac * dt_days;
  state.calendar_growth += ar * dt_days;
  state.elapsed_days += dt_days;
  detail::refresh_norms(state);
  return state;
}

/// Applies one closed half-cycle directly. This is also the fast-forward
/// path for long cycling studies.
inline void apply_half_cycle(AgingState& state, const HalfCycle& hc, const CycleCoeffGrid& coeffs) {
  const double bc = std::max(0.0, interpolate(coeffs.beta_c, hc.depth, hc.mean));
  const double br = std::max(0.0, interpolate(coeffs.beta_r, hc.depth, hc.mean));
  const double cycles = 0.5 * hc.depth;
  state.eqfc += cycles;
  state.cycle_fade += cycles * bc;
  state.cycle_growth += cycles * br;
}

/// Feeds one SOC sample to the rainflow counter and books every half-cycle
/// it closes.
inline AgingState cycle_accumulate(AgingState state, double soc_sample, const CycleCoeffGrid& coeffs) {
  bool changed = false;
  state.rainflow.push(soc_sample, [&](const HalfCycle& hc) {
    apply_half_cycle(state, hc, coeffs);
    changed = true;
  });
  if (changed) detail::refresh_norms(state);
  return state;
}

/// Counts the unclosed residue as half-cycles (end of simulation).
inline AgingState flush_cycles(AgingState state, const CycleCoeffGrid& coeffs) {
  state.rainflow.flush([&](const HalfCycle& hc) { apply_half_cycle(state, hc, coeffs); });
  detail::refresh_norms(state);
  return state;
}

enum class EolStatus { OK, CapacityEOL, ResistanceEOL, Both };

inline EolStatus eol_check(const AgingState& state) {
  const bool cap = state.c_norm <= kEolCapacity;
  const bool res = state.r_norm >= kEolResistance;
  if (cap && res) return EolStatus::Both;
  if (cap) return EolStatus::CapacityEOL;
  if (res) return EolStatus::ResistanceEOL;
  return EolStatus::OK;
}

inline const char* to_string(EolStatus s) {
  switch (s) {
    case EolStatus::OK: return "OK";
    case EolStatus::CapacityEOL: return "CapacityEOL";
    case EolStatus::ResistanceEOL: return "ResistanceEOL";
    case EolStatus::Both: return "Both";
  }
  return "?";
}

/// Loads a calendar grid from two matrix files (SOC % rows, °C columns).
inline CalendarCoeffGrid load_calendar_coefficients(const std::filesystem::path& alpha_c_file,
                                                    const std::filesystem::path& alpha_r_file) {
  return {read_matrix_csv(alpha_c_file, 100.0, 1.0), read_matrix_csv(alpha_r_file, 100.0, 1.0)};
}

/// Loads a cycle grid from two matrix files (DOD % rows, mean SOC % columns).
inline CycleCoeffGrid load_cycle_coefficients(const std::filesystem::path& beta_c_file,
                                              const std::filesystem::path& beta_r_file) {
  return {read_matrix_csv(beta_c_file, 100.0, 100.0), read_matrix_csv(beta_r_file, 100.0, 100.0)};
}

}  // namespace evsim
