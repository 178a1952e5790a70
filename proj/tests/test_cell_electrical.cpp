#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace evsim;
using evsim::testing::flat_cells;
using evsim::testing::shipped_cells;

namespace {

struct EulerOracle {
  double soc, u1 = 0.0, u2 = 0.0;
};

// Forward Euler on the continuous 2RC equations, parameters re-read at
// every micro-step.
double euler_advance(EulerOracle& o, const CellParameterSet& set, const AgingState& aging, double current,
                     double temp, double duration, double h) {
  const int n = static_cast<int>(std::lround(duration / h));
  double v = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto p = lookup(set, o.soc, temp);
    const double r1 = p.r1 * aging.r_norm, r2 = p.r2 * aging.r_norm;
    o.u1 += h * (-o.u1 / (r1 * p.c1) + current / p.c1);
    o.u2 += h * (-o.u2 / (r2 * p.c2) + current / p.c2);
    o.soc += h * current / (3600.0 * set.nominal_capacity_ah * aging.c_norm);
    v = p.ocv + current * p.r_ser * aging.r_norm + o.u1 + o.u2;
  }
  return v;
}

}  // namespace

TEST(CellElectrical, MatchesMillisecondEulerOverPulse) {
  const auto& set = shipped_cells();
  const AgingState fresh;
  for (double temp : {5.0, 15.0}) {
    EcmState s{0.6, 0.0, 0.0};
    EulerOracle o{0.6};
    double worst = 0.0;
    // 60 s of 1 C discharge, then 60 s rest.
    for (int k = 0; k < 120; ++k) {
      const double current = k < 60 ? -52.0 : 0.0;
      const auto step = step_ecm(s, set, fresh, current, temp, 1.0);
      s = step.state;
      const double v_oracle = euler_advance(o, set, fresh, current, temp, 1.0, 1e-3);
      worst = std::max(worst, std::fabs(step.result.terminal_voltage_cell - v_oracle));
    }
    EXPECT_LT(worst, 1e-3) << "temp " << temp;
  }
}

TEST(CellElectrical, ExactHoldIsStepSizeIndependentForConstantParameters) {
  const auto set = flat_cells(3.7, 1e-3, 2e-3, 5.0, 1.5e-3, 1.0e4);
  const AgingState fresh;
  EcmState coarse{0.5}, fine{0.5};
  for (int k = 0; k < 30; ++k) coarse = step_ecm(coarse, set, fresh, 40.0, 25.0, 1.0).state;
  for (int k = 0; k < 300; ++k) fine = step_ecm(fine, set, fresh, 40.0, 25.0, 0.1).state;
  EXPECT_NEAR(coarse.u1, fine.u1, 1e-13);
  EXPECT_NEAR(coarse.u2, fine.u2, 1e-13);
  // Closed form u(t) = R·I·(1 − e^{−t/τ}).
  EXPECT_NEAR(coarse.u2, 1.5e-3 * 40.0 * (1.0 - std::exp(-30.0 / 15.0)), 1e-13);
}

TEST(CellElectrical, HalvingStepBarelyMovesVoltageOnSmoothProfile) {
  const auto& set = shipped_cells();
  const AgingState fresh;
  auto current_at = [](double t) { return 30.0 * std::sin(t / 40.0); };
  EcmState a{0.5}, b{0.5};
  double va = 0.0, vb = 0.0;
  for (int k = 0; k < 300; ++k) {
    const auto st = step_ecm(a, set, fresh, current_at(k + 0.5), 25.0, 1.0);
    a = st.state;
    va = st.result.terminal_voltage_cell;
  }
  for (int k = 0; k < 600; ++k) {
    const auto st = step_ecm(b, set, fresh, current_at(0.5 * k + 0.25), 25.0, 0.5);
    b = st.state;
    vb = st.result.terminal_voltage_cell;
  }
  EXPECT_LT(std::fabs(va - vb), 2e-3);
}

TEST(CellElectrical, ChargeIsConservedEveryStep) {
  const auto& set = shipped_cells();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> amps(-100.0, 100.0);
  AgingState aged;
  aged.c_norm = 0.87;
  EcmState s{0.5};
  double worst = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double i = amps(rng);
    const auto st = step_ecm(s, set, aged, i, 25.0, 1.0);
    const double expected = s.soc + i / (3600.0 * 52.0 * 0.87);
    if (!st.result.soc_saturated) worst = std::max(worst, std::fabs(st.state.soc - expected));
    s = st.state;
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(CellElectrical, AgingScalesResistancesAndTimeConstants) {
  const auto set = flat_cells(3.7, 1e-3, 2e-3, 5.0, 1.5e-3, 1.0e4);
  AgingState aged;
  aged.r_norm = 2.0;
  aged.c_norm = 0.8;
  const auto e = effective_cell(set, aged, 0.5, 25.0);
  EXPECT_DOUBLE_EQ(e.r_ser, 2e-3);
  EXPECT_DOUBLE_EQ(e.tau1, 2.0 * 2e-3 * 5.0);
  EXPECT_DOUBLE_EQ(e.tau2, 2.0 * 1.5e-3 * 1.0e4);
  EXPECT_DOUBLE_EQ(e.capacity_ah, 41.6);
  const auto st = step_ecm(EcmState{0.5}, set, aged, 10.0, 25.0, 1.0);
  EXPECT_NEAR(st.state.soc, 0.5 + 10.0 / (3600.0 * 41.6), 1e-15);
}

TEST(CellElectrical, VoltageResponsePredictsTheStep) {
  const auto& set = shipped_cells();
  const AgingState fresh;
  const EcmState s{0.7, 0.004, 0.01};
  const auto resp = voltage_response(s, effective_cell(set, fresh, s.soc, 25.0), 1.0);
  const auto st = step_ecm(s, set, fresh, 35.0, 25.0, 1.0);
  EXPECT_NEAR(resp.at(35.0), st.result.terminal_voltage_cell, 1e-12);
  EXPECT_NEAR(resp.scaled(93.0).at(35.0), st.result.terminal_voltage_pack, 1e-9);
}

TEST(CellElectrical, HeatIsNonNegativeAndZeroAtRest) {
  const auto& set = shipped_cells();
  const AgingState fresh;
  EXPECT_GT(step_ecm(EcmState{0.5}, set, fresh, -52.0, 25.0, 1.0).result.heat_power, 0.0);
  EXPECT_EQ(step_ecm(EcmState{0.5}, set, fresh, 0.0, 25.0, 1.0).result.heat_power, 0.0);
}

TEST(CellElectrical, RestVoltageAtMidpoint) {
  const auto& set = shipped_cells();
  EXPECT_EQ(rest_voltage(EcmState{0.5}, set, 25.0), 3.6936);
  const auto st = step_ecm(EcmState{0.5}, set, AgingState{}, 0.0, 25.0, 1.0);
  EXPECT_EQ(st.result.terminal_voltage_cell, 3.6936);
  EXPECT_NEAR(st.result.terminal_voltage_pack, 343.5048, 1e-9);
}

TEST(CellElectrical, SocSaturatesWithFlag) {
  const auto& set = shipped_cells();
  const auto full = step_ecm(EcmState{0.9999}, set, AgingState{}, 100.0, 25.0, 60.0);
  EXPECT_TRUE(full.result.soc_saturated);
  EXPECT_EQ(full.state.soc, 1.0);
  const auto empty = step_ecm(EcmState{0.0001}, set, AgingState{}, -100.0, 25.0, 60.0);
  EXPECT_TRUE(empty.result.soc_saturated);
  EXPECT_EQ(empty.state.soc, 0.0);
}

TEST(CellElectrical, RejectsNonFiniteInputAndBadStep) {
  const auto& set = shipped_cells();
  EXPECT_THROW(step_ecm(EcmState{0.5}, set, AgingState{}, std::nan(""), 25.0, 1.0), std::domain_error);
  EXPECT_THROW(step_ecm(EcmState{0.5}, set, AgingState{}, INFINITY, 25.0, 1.0), std::domain_error);
  EXPECT_THROW(step_ecm(EcmState{0.5}, set, AgingState{}, 1.0, std::nan(""), 1.0), std::domain_error);
  EXPECT_THROW(step_ecm(EcmState{0.5}, set, AgingState{}, 1.0, 25.0, 0.0), std::invalid_argument);
  EXPECT_THROW(step_ecm(EcmState{0.5}, set, AgingState{}, 1.0, 25.0, -1.0), std::invalid_argument);
}
