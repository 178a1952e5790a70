#pragma once

// Charging strategies. A strategy sees only what a real controller on the
// grid side could see and answers with a requested AC power.

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evsim/profile.hpp"

namespace evsim {

struct Observation {
  double t = 0.0;      // s
  double soc = 0.0;    // fraction
  double t_pack = 0.0; // °C
  bool plugged_in = false;
  double current_ac_power = 0.0;  // W
  double profile_request = 0.0;   // W, value_w of the active plugged-in record
  std::span<const double> setpoints;  // achievable non-zero AC powers, ascending
};

struct StrategyDecision {
  double requested_ac_power = 0.0;  // W, 0 pauses charging
};

using Strategy = std::function<StrategyDecision(const Observation&)>;

class StrategyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(':', start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double strategy_number(std::string_view spec, std::string_view text) {
  double v = 0.0;
  if (!parse_double(text, v)) throw StrategyError("strategy '" + std::string(spec) + "': bad number '" + std::string(text) + "'");
  return v;
}

inline double max_setpoint(const Observation& o) { return o.setpoints.empty() ? 0.0 : o.setpoints.back(); }

}  // namespace detail

/// Built-in strategies:
///   profile                      charge at the value_w of the profile record
///   max                          largest set-point whenever plugged in
///   off                          never charge
///   constant:<W>                 fixed request
///   soc-target:<soc>[:<W>]       charge until soc reaches the target
///   window:<t0>:<t1>[:<W>]       charge only for t0 <= t < t1
/// Omitted powers default to the largest set-point.
inline Strategy make_strategy(std::string_view spec) {
  const auto parts = detail::split_colon(spec);
  const auto& name = parts.front();
  auto power_or_max = [&](std::size_t i) -> std::function<double(const Observation&)> {
    if (parts.size() > i) {
      const double w = detail::strategy_number(spec, parts[i]);
      if (!(w >= 0.0)) throw StrategyError("strategy '" + std::string(spec) + "': power must be >= 0");
      return [w](const Observation&) { return w; };
    }
    return detail::max_setpoint;
  };
  auto expect = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi) throw StrategyError("strategy '" + std::string(spec) + "': wrong argument count");
  };

  if (name == "profile") {
    expect(1, 1);
    return [](const Observation& o) { return StrategyDecision{o.profile_request}; };
  }
  if (name == "max") {
    expect(1, 1);
    return [](const Observation& o) { return StrategyDecision{detail::max_setpoint(o)}; };
  }
  if (name == "off") {
    expect(1, 1);
    return [](const Observation&) { return StrategyDecision{0.0}; };
  }
  if (name == "constant") {
    expect(2, 2);
    auto power = power_or_max(1);
    return [power](const Observation& o) { return StrategyDecision{power(o)}; };
  }
  if (name == "soc-target") {
    expect(2, 3);
    const double target = detail::strategy_number(spec, parts[1]);
    auto power = power_or_max(2);
    return [target, power](const Observation& o) { return StrategyDecision{o.soc < target ? power(o) : 0.0}; };
  }
  if (name == "window") {
    expect(3, 4);
    const double t0 = detail::strategy_number(spec, parts[1]);
    const double t1 = detail::strategy_number(spec, parts[2]);
    auto power = power_or_max(3);
    return [t0, t1, power](const Observation& o) {
      return StrategyDecision{o.t >= t0 && o.t < t1 ? power(o) : 0.0};
    };
  }
  throw StrategyError("unknown strategy '" + std::string(spec) + "'");
}

}  // namespace evsim
