#pragma once

// Scenario configuration: a key = value text file naming the data files
// and overriding plant, charger, BMS and run settings.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "evsim/aging.hpp"
#include "evsim/bms.hpp"
#include "evsim/charger.hpp"
#include "evsim/pack_thermal.hpp"
#include "evsim/param_store.hpp"
#include "evsim/profile.hpp"

#ifndef EVSIM_DATA_DIR
#define EVSIM_DATA_DIR "data/smart_ed"
#endif

namespace evsim {

/// Shipped data directory; the EVSIM_DATA_DIR environment variable wins.
inline std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("EVSIM_DATA_DIR"); env && *env) return env;
  return EVSIM_DATA_DIR;
}

struct PlantPaths {
  std::filesystem::path param_dir;
  std::filesystem::path calendar_alpha_c;
  std::filesystem::path calendar_alpha_r;
  std::filesystem::path cycle_beta_c;
  std::filesystem::path cycle_beta_r;

  static PlantPaths defaults(const std::filesystem::path& data_dir) {
    return {data_dir / "cell", data_dir / "aging" / "calendar_alpha_c.csv", data_dir / "aging" / "calendar_alpha_r.csv",
            data_dir / "aging" / "cycle_beta_c.csv", data_dir / "aging" / "cycle_beta_r.csv"};
  }

  auto operator<=>(const PlantPaths&) const = default;
};

/// Immutable tables shared by any number of concurrent runs.
struct PlantData {
  CellParameterSet cell;
  CalendarCoeffGrid calendar;
  CycleCoeffGrid cycle;
};

inline std::shared_ptr<const PlantData> load_plant_data(const PlantPaths& paths) {
  auto data = std::make_shared<PlantData>();
  data->cell = load_parameter_set(paths.param_dir);
  data->calendar = load_calendar_coefficients(paths.calendar_alpha_c, paths.calendar_alpha_r);
  data->cycle = load_cycle_coefficients(paths.cycle_beta_c, paths.cycle_beta_r);
  return data;
}

/// Thread-safe cache so a batch loads each distinct data set once.
class PlantCache {
 public:
  std::shared_ptr<const PlantData> get(const PlantPaths& paths) {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(paths);
    if (it != cache_.end()) return it->second;
    auto data = load_plant_data(paths);
    cache_.emplace(paths, data);
    return data;
  }

 private:
  std::mutex mutex_;
  std::map<PlantPaths, std::shared_ptr<const PlantData>> cache_;
};

struct InitialConditions {
  double soc = 0.5;
  std::optional<double> t_pack;  // defaults to the first ambient temperature
  double c_norm = 1.0;
  double r_norm = 1.0;
};

struct ScenarioConfig {
  std::shared_ptr<const PlantData> plant;
  ThermalParams thermal = ThermalParams::defaults(ThermalMode::EVOperation);
  ChargerConfig charger;
  BmsLimits bms;
  double dt = 1.0;                 // s
  double control_interval = 10.0;  // s between strategy polls
  double aging_interval = 60.0;    // s between calendar aging updates
  bool aging_enabled = true;
  InitialConditions initial;

  double v_max_pack() const { return plant->cell.n_series * bms.v_cell_max; }
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline ScenarioConfig default_config(const std::filesystem::path& data_dir = default_data_dir()) {
  ScenarioConfig cfg;
  cfg.plant = load_plant_data(PlantPaths::defaults(data_dir));
  cfg.charger.efficiency_curve = read_curve_csv(data_dir / "charger" / "efficiency.csv");
  cfg.charger.ramp_curve = read_curve_csv(data_dir / "charger" / "ramp_up.csv");
  return cfg;
}

/// Rejects settings the engine cannot run with.
inline void validate_config(const ScenarioConfig& cfg) {
  if (!cfg.plant) throw ConfigError("config: plant data not loaded");
  if (!(cfg.dt > 0.0)) throw ConfigError("config: dt must be positive");
  if (!(cfg.control_interval > 0.0)) throw ConfigError("config: control_interval must be positive");
  if (!(cfg.aging_interval > 0.0)) throw ConfigError("config: aging_interval must be positive");
  if (!(cfg.bms.soc_min <= cfg.bms.soc_max)) throw ConfigError("config: bms.soc_min must not exceed bms.soc_max");
  if (!(cfg.initial.soc >= 0.0 && cfg.initial.soc <= 1.0)) throw ConfigError("config: initial.soc outside [0,1]");
  if (!(cfg.initial.c_norm > 0.0 && cfg.initial.c_norm <= 1.0)) throw ConfigError("config: initial.c_norm outside (0,1]");
  if (!(cfg.initial.r_norm >= 1.0)) throw ConfigError("config: initial.r_norm must be >= 1");
  if (!(cfg.thermal.c_pack > 0.0 && cfg.thermal.alpha_sum() > 0.0)) throw ConfigError("config: thermal constants must be positive");
  const auto& eff = cfg.charger.efficiency_curve.points();
  for (std::size_t i = 0; i < eff.size(); ++i) {
    if (!(eff[i].second > 0.0 && eff[i].second <= 1.0)) throw ConfigError("config: efficiency outside (0,1]");
    if (i > 0 && eff[i].second < eff[i - 1].second) throw ConfigError("config: efficiency curve must be non-decreasing");
  }
  const auto& ramp = cfg.charger.ramp_curve.points();
  for (std::size_t i = 1; i < ramp.size(); ++i) {
    if (ramp[i].second < ramp[i - 1].second) throw ConfigError("config: ramp curve must be non-decreasing");
  }
}

/// Parses a configuration file. Relative paths are resolved against the
/// file's directory; data paths not given fall back to the shipped set.
inline ScenarioConfig load_config(const std::filesystem::path& file, PlantCache* cache = nullptr) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  const auto base = file.parent_path();
  auto resolve = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_absolute() ? p : base / p;
  };

  std::filesystem::path data_dir = default_data_dir();
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(file.string() + ":" + std::to_string(number) + ": expected key = value");
    }
    kv[std::string(detail::trim(t.substr(0, eq)))] = std::string(detail::trim(t.substr(eq + 1)));
  }
  if (auto it = kv.find("data_dir"); it != kv.end()) data_dir = resolve(it->second);

  PlantPaths paths = PlantPaths::defaults(data_dir);
  std::filesystem::path efficiency_file = data_dir / "charger" / "efficiency.csv";
  std::filesystem::path ramp_file = data_dir / "charger" / "ramp_up.csv";
  ScenarioConfig cfg;
  std::optional<ThermalMode> mode;
  std::map<std::string, double> thermal_overrides;

  auto number_of = [&](const std::string& key, const std::string& v) {
    double out = 0.0;
    if (!detail::parse_double(v, out)) throw ConfigError("config key '" + key + "': not a number: " + v);
    return out;
  };
  auto flag_of = [&](const std::string& key, const std::string& v) {
    const auto s = detail::lower(v);
    if (s == "on" || s == "true" || s == "yes" || s == "1") return true;
    if (s == "off" || s == "false" || s == "no" || s == "0") return false;
    throw ConfigError("config key '" + key + "': expected on/off, got " + v);
  };

  const std::map<std::string, std::function<void(const std::string&, const std::string&)>> handlers = {
      {"data_dir", [](const std::string&, const std::string&) {}},
      {"param_dir", [&](auto&, auto& v) { paths.param_dir = resolve(v); }},
      {"calendar_alpha_c", [&](auto&, auto& v) { paths.calendar_alpha_c = resolve(v); }},
      {"calendar_alpha_r", [&](auto&, auto& v) { paths.calendar_alpha_r = resolve(v); }},
      {"cycle_beta_c", [&](auto&, auto& v) { paths.cycle_beta_c = resolve(v); }},
      {"cycle_beta_r", [&](auto&, auto& v) { paths.cycle_beta_r = resolve(v); }},
      {"efficiency_curve", [&](auto&, auto& v) { efficiency_file = resolve(v); }},
      {"ramp_curve", [&](auto&, auto& v) { ramp_file = resolve(v); }},
      {"thermal_mode",
       [&](auto& k, auto& v) {
         const auto s = detail::lower(v);
         if (s == "evoperation") mode = ThermalMode::EVOperation;
         else if (s == "labpacktest") mode = ThermalMode::LabPackTest;
         else throw ConfigError("config key '" + k + "': unknown mode " + v);
       }},
      {"thermal.c_pack", [&](auto& k, auto& v) { thermal_overrides["c_pack"] = number_of(k, v); }},
      {"thermal.alpha_x", [&](auto& k, auto& v) { thermal_overrides["alpha_x"] = number_of(k, v); }},
      {"thermal.alpha_y", [&](auto& k, auto& v) { thermal_overrides["alpha_y"] = number_of(k, v); }},
      {"thermal.alpha_z", [&](auto& k, auto& v) { thermal_overrides["alpha_z"] = number_of(k, v); }},
      {"charger_mode",
       [&](auto& k, auto& v) {
         const auto m = parse_charger_mode(v);
         if (!m) throw ConfigError("config key '" + k + "': unknown charger mode " + v);
         cfg.charger.mode = *m;
       }},
      {"grid_voltage", [&](auto& k, auto& v) { cfg.charger.grid_voltage = number_of(k, v); }},
      {"charger.start_dead_time", [&](auto& k, auto& v) { cfg.charger.start_dead_time = number_of(k, v); }},
      {"dt", [&](auto& k, auto& v) { cfg.dt = number_of(k, v); }},
      {"control_interval", [&](auto& k, auto& v) { cfg.control_interval = number_of(k, v); }},
      {"aging_interval", [&](auto& k, auto& v) { cfg.aging_interval = number_of(k, v); }},
      {"aging", [&](auto& k, auto& v) { cfg.aging_enabled = flag_of(k, v); }},
      {"bms.soc_min", [&](auto& k, auto& v) { cfg.bms.soc_min = number_of(k, v); }},
      {"bms.soc_max", [&](auto& k, auto& v) { cfg.bms.soc_max = number_of(k, v); }},
      {"bms.v_cell_min", [&](auto& k, auto& v) { cfg.bms.v_cell_min = number_of(k, v); }},
      {"bms.v_cell_max", [&](auto& k, auto& v) { cfg.bms.v_cell_max = number_of(k, v); }},
      {"bms.t_min", [&](auto& k, auto& v) { cfg.bms.t_min = number_of(k, v); }},
      {"bms.t_max", [&](auto& k, auto& v) { cfg.bms.t_max = number_of(k, v); }},
      {"bms.max_current", [&](auto& k, auto& v) { cfg.bms.max_current = number_of(k, v); }},
      {"bms.cv_taper_floor", [&](auto& k, auto& v) { cfg.bms.cv_taper_floor = number_of(k, v); }},
      {"initial.soc", [&](auto& k, auto& v) { cfg.initial.soc = number_of(k, v); }},
      {"initial.t_pack", [&](auto& k, auto& v) { cfg.initial.t_pack = number_of(k, v); }},
      {"initial.c_norm", [&](auto& k, auto& v) { cfg.initial.c_norm = number_of(k, v); }},
      {"initial.r_norm", [&](auto& k, auto& v) { cfg.initial.r_norm = number_of(k, v); }},
  };

  for (const auto& [key, value] : kv) {
    auto h = handlers.find(key);
    if (h == handlers.end()) throw ConfigError("config: unknown key '" + key + "'");
    h->second(key, value);
  }

  cfg.thermal = ThermalParams::defaults(mode.value_or(ThermalMode::EVOperation));
  for (const auto& [name, v] : thermal_overrides) {
    if (name == "c_pack") cfg.thermal.c_pack = v;
    if (name == "alpha_x") cfg.thermal.alpha_x = v;
    if (name == "alpha_y") cfg.thermal.alpha_y = v;
    if (name == "alpha_z") cfg.thermal.alpha_z = v;
  }

  try {
    cfg.plant = cache ? cache->get(paths) : load_plant_data(paths);
    cfg.charger.efficiency_curve = read_curve_csv(efficiency_file);
    cfg.charger.ramp_curve = read_curve_csv(ramp_file);
  } catch (const DataError& e) {
    throw ConfigError(std::string("config ") + file.string() + ": " + e.what());
  }
  validate_config(cfg);
  return cfg;
}

}  // namespace evsim
