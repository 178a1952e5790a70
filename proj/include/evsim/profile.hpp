#pragma once

// Scenario profiles: a zero-order-hold schedule of what the vehicle is
// doing. Record i applies on [t_i, t_{i+1}); the last record only marks the
// end of the scenario.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evsim/charger.hpp"
#include "evsim/table.hpp"

namespace evsim {

enum class SegmentKind { Drive, PluggedIn, Idle };

inline const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::Drive: return "drive";
    case SegmentKind::PluggedIn: return "plugged_in";
    case SegmentKind::Idle: return "idle";
  }
  return "?";
}

struct ProfileRecord {
  double t = 0.0;  // s
  SegmentKind kind = SegmentKind::Idle;
  double value_w = 0.0;  // Drive: DC power at the battery, signed. PluggedIn: requested AC power.
  double ambient_c = 25.0;
  std::optional<ChargerMode> charger_mode;
};

struct ScenarioProfile {
  std::vector<ProfileRecord> records;

  bool empty() const noexcept { return records.size() < 2; }
  double start() const { return records.empty() ? 0.0 : records.front().t; }
  double end() const { return records.empty() ? 0.0 : records.back().t; }
};

inline constexpr double kMotorPowerLimit = 55000.0;  // W

class ProfileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void validate_profile(const ScenarioProfile& profile) {
  for (std::size_t i = 0; i < profile.records.size(); ++i) {
    const auto& r = profile.records[i];
    const std::string where = "profile record " + std::to_string(i + 1) + ": ";
    if (!std::isfinite(r.t) || !std::isfinite(r.value_w) || !std::isfinite(r.ambient_c)) {
      throw ProfileError(where + "non-finite field");
    }
    if (i > 0 && !(r.t > profile.records[i - 1].t)) throw ProfileError(where + "timestamps must strictly increase");
    if (r.kind == SegmentKind::Drive && std::fabs(r.value_w) > kMotorPowerLimit) {
      throw ProfileError(where + "drive power exceeds the 55 kW motor rating");
    }
    if (r.kind == SegmentKind::PluggedIn && r.value_w < 0.0) {
      throw ProfileError(where + "plugged-in request must be >= 0 W");
    }
  }
}

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  out.erase(std::remove(out.begin(), out.end(), '_'), out.end());
  out.erase(std::remove(out.begin(), out.end(), '-'), out.end());
  return out;
}

}  // namespace detail

inline std::optional<SegmentKind> parse_segment_kind(std::string_view text) {
  const auto s = detail::lower(text);
  if (s == "drive") return SegmentKind::Drive;
  if (s == "pluggedin" || s == "plugged" || s == "charge") return SegmentKind::PluggedIn;
  if (s == "idle" || s == "parked") return SegmentKind::Idle;
  return std::nullopt;
}

inline std::optional<ChargerMode> parse_charger_mode(std::string_view text) {
  const auto s = detail::lower(text);
  if (s == "onephase" || s == "1phase" || s == "1") return ChargerMode::OnePhase;
  if (s == "threephase" || s == "3phase" || s == "3") return ChargerMode::ThreePhase;
  return std::nullopt;
}

inline constexpr std::string_view kProfileHeader = "t_s,kind,value_w,ambient_c,charger_mode";

/// Reads a profile file with header `t_s,kind,value_w,ambient_c,charger_mode`.
/// The charger_mode cell may be empty.
inline ScenarioProfile read_profile_csv(const std::filesystem::path& path) {
  const std::string file = path.string();
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw DataError(file, 0, "empty profile (header missing)");
  {
    const auto cells = detail::split_csv(lines.front().second);
    std::string header;
    for (std::size_t i = 0; i < cells.size(); ++i) header += (i ? "," : "") + std::string(cells[i]);
    if (header != kProfileHeader) {
      throw DataError(file, lines.front().first, "expected header '" + std::string(kProfileHeader) + "'");
    }
  }
  ScenarioProfile profile;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [number, text] = lines[li];
    auto cells = detail::split_csv(text);
    if (cells.size() == 4) cells.emplace_back();
    if (cells.size() != 5) throw DataError(file, number, "expected 5 cells");
    ProfileRecord r;
    if (!detail::parse_double(cells[0], r.t)) throw DataError(file, number, "bad t_s");
    const auto kind = parse_segment_kind(cells[1]);
    if (!kind) throw DataError(file, number, "unknown kind '" + std::string(cells[1]) + "'");
    r.kind = *kind;
    if (!detail::parse_double(cells[2], r.value_w)) throw DataError(file, number, "bad value_w");
    if (!detail::parse_double(cells[3], r.ambient_c)) throw DataError(file, number, "bad ambient_c");
    if (!cells[4].empty()) {
      r.charger_mode = parse_charger_mode(cells[4]);
      if (!r.charger_mode) throw DataError(file, number, "unknown charger_mode '" + std::string(cells[4]) + "'");
    }
    profile.records.push_back(r);
  }
  try {
    validate_profile(profile);
  } catch (const ProfileError& e) {
    throw DataError(file, 0, e.what());
  }
  return profile;
}

}  // namespace evsim
