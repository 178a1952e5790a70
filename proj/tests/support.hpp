#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "evsim/evsim.hpp"

namespace evsim::testing {

inline const CellParameterSet& shipped_cells() {
  static const CellParameterSet set = load_parameter_set(default_data_dir() / "cell");
  return set;
}

inline const ScenarioConfig& shipped_config() {
  static const ScenarioConfig cfg = default_config();
  return cfg;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(EVSIM_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

/// Uniform table: every node holds v.
inline ParamGrid flat_grid(double v) {
  ParamGrid g;
  g.row_keys = {0.0, 1.0};
  g.col_keys = {-20.0, 40.0};
  g.values.assign(4, v);
  return g;
}

/// Cell with SOC- and temperature-independent parameters, for closed-form checks.
inline CellParameterSet flat_cells(double ocv, double r_ser, double r1, double c1, double r2, double c2) {
  CellParameterSet s;
  s.ocv = flat_grid(ocv);
  s.r_ser = flat_grid(r_ser);
  s.r1 = flat_grid(r1);
  s.c1 = flat_grid(c1);
  s.r2 = flat_grid(r2);
  s.c2 = flat_grid(c2);
  return s;
}

inline ScenarioProfile make_profile(std::initializer_list<ProfileRecord> records) {
  ScenarioProfile p;
  p.records = records;
  return p;
}

}  // namespace evsim::testing
