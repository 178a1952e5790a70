#include <gtest/gtest.h>

#include "support.hpp"

using namespace evsim;
using evsim::testing::scratch_dir;
using evsim::testing::shipped_cells;

namespace {

void copy_cell_dir(const std::filesystem::path& to) {
  for (const char* f : kParameterFiles) std::filesystem::copy_file(default_data_dir() / "cell" / f, to / f);
}

}  // namespace

TEST(ParamStore, ShapesOfShippedTables) {
  const auto& s = shipped_cells();
  EXPECT_EQ(s.ocv.rows(), 23u);
  EXPECT_EQ(s.ocv.cols(), 5u);
  for (const auto* g : {&s.r_ser, &s.r1, &s.r2, &s.c1, &s.c2}) {
    EXPECT_EQ(g->rows(), 21u);
    EXPECT_EQ(g->cols(), 6u);
    EXPECT_EQ(g->row_keys.front(), 0.0);
    EXPECT_EQ(g->row_keys.back(), 1.0);
  }
  EXPECT_EQ(s.ocv.row_keys.front(), -0.05);
  EXPECT_EQ(s.ocv.row_keys.back(), 1.05);
}

TEST(ParamStore, ReferenceSpotValues) {
  const auto& s = shipped_cells();
  // Values as printed in the measured tables.
  EXPECT_EQ(interpolate(s.r_ser, 0.40, 5.0), 0.0010559);
  EXPECT_EQ(interpolate(s.r1, 0.70, 15.0), 0.0019368);
  EXPECT_EQ(interpolate(s.r2, 0.95, 35.0), 0.00068296);
  EXPECT_EQ(interpolate(s.c1, 0.0, -15.0), 6.2036);
  EXPECT_EQ(interpolate(s.c2, 0.0, 25.0), 60.0993);
  EXPECT_EQ(interpolate(s.ocv, 0.65, 25.0), 3.7892);
  EXPECT_EQ(interpolate(s.ocv, -0.05, 15.0), 3.4152);
}

TEST(ParamStore, RestOcvAtMidpoint) {
  const auto p = lookup(shipped_cells(), 0.5, 25.0);
  EXPECT_EQ(p.ocv, 3.6936);
}

TEST(ParamStore, ShippedSetValidates) {
  const auto report = validate_parameter_set(shipped_cells());
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.count(FindingKind::TauOrdering), 0u);
  EXPECT_EQ(report.count(FindingKind::NonPositive), 0u);
  EXPECT_EQ(report.count(FindingKind::OcvNonMonotone), 0u);
  EXPECT_EQ(report.count(FindingKind::OcvOutOfRange), 0u);
}

TEST(ParamStore, TimeConstantsSeparatedAtEveryNode) {
  const auto& s = shipped_cells();
  for (double soc : s.r1.row_keys) {
    for (double temp : s.r1.col_keys) {
      const auto p = lookup(s, soc, temp);
      EXPECT_LT(p.tau1(), p.tau2()) << "soc " << soc << " temp " << temp;
    }
  }
}

TEST(ParamStore, BulkTimeConstantsInTheirDecades) {
  const double tau1 = median_time_constant(shipped_cells(), 1);
  const double tau2 = median_time_constant(shipped_cells(), 2);
  EXPECT_GE(tau1, 1e-2);
  EXPECT_LE(tau1, 1e-1);
  EXPECT_GE(tau2, 1e1);
  EXPECT_LE(tau2, 1e2);
}

TEST(ParamStore, MissingFileNamesTheParameter) {
  const auto dir = scratch_dir("missing_rser");
  copy_cell_dir(dir);
  std::filesystem::remove(dir / "r_ser.csv");
  try {
    load_parameter_set(dir);
    FAIL() << "no exception";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("R_ser"), std::string::npos) << e.what();
  }
}

TEST(ParamStore, CorruptFixtureFlagsTauOrdering) {
  const auto set = load_parameter_set(std::filesystem::path(EVSIM_TEST_FIXTURES) / "corrupt_cell");
  const auto report = validate_parameter_set(set);
  EXPECT_FALSE(report.ok());
  ASSERT_GE(report.count(FindingKind::TauOrdering), 1u);
  bool found = false;
  for (const auto& f : report.findings) {
    if (f.kind == FindingKind::TauOrdering && f.soc == 0.10 && f.temp_c == 15.0) found = true;
  }
  EXPECT_TRUE(found);
}

TEST(ParamStore, NonPositiveResistanceIsAnError) {
  auto set = shipped_cells();
  set.r2.at(3, 2) = -1e-4;
  const auto report = validate_parameter_set(set);
  EXPECT_FALSE(report.ok());
  EXPECT_EQ(report.count(FindingKind::NonPositive), 1u);
}

TEST(ParamStore, OcvDecreasingWithSocIsAnError) {
  auto set = shipped_cells();
  set.ocv.at(10, 1) = set.ocv.at(9, 1) - 0.01;
  EXPECT_EQ(validate_parameter_set(set).count(FindingKind::OcvNonMonotone), 1u);
}

TEST(ParamStore, DecadeOutlierIsInformational) {
  auto set = shipped_cells();
  set.c1.at(10, 2) *= 100.0;
  const auto report = validate_parameter_set(set);
  EXPECT_GE(report.count(FindingKind::Outlier), 1u);
}
