#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "support.hpp"

using namespace evsim;

namespace {

const ScenarioConfig& cfg() { return evsim::testing::shipped_config(); }

// Batch rainflow over a complete history: reversals first, then the
// three-point rule, then the residue as half-cycles.
std::vector<HalfCycle> batch_rainflow(const std::vector<double>& history) {
  std::vector<double> pts;
  for (double x : history) {
    if (!pts.empty() && x == pts.back()) continue;
    if (pts.size() >= 2 && (pts.back() - pts[pts.size() - 2]) * (x - pts.back()) > 0) {
      pts.back() = x;  // still moving the same way
      continue;
    }
    pts.push_back(x);
  }
  std::vector<HalfCycle> out;
  auto half = [&](double a, double b) { out.push_back({std::fabs(a - b), 0.5 * (a + b)}); };
  std::vector<double> st;
  for (double p : pts) {
    st.push_back(p);
    while (st.size() >= 3) {
      const std::size_t n = st.size();
      const double x = std::fabs(st[n - 1] - st[n - 2]);
      const double y = std::fabs(st[n - 2] - st[n - 3]);
      if (x < y) break;
      if (n == 3) {
        half(st[0], st[1]);
        st.erase(st.begin());
      } else {
        half(st[n - 3], st[n - 2]);
        half(st[n - 3], st[n - 2]);
        st.erase(st.begin() + static_cast<long>(n) - 3, st.begin() + static_cast<long>(n) - 1);
      }
    }
  }
  for (std::size_t i = 1; i < st.size(); ++i) half(st[i - 1], st[i]);
  return out;
}

std::vector<HalfCycle> stream_rainflow(const std::vector<double>& history) {
  StreamingRainflow rf;
  std::vector<HalfCycle> out;
  auto sink = [&](const HalfCycle& h) { out.push_back(h); };
  for (double x : history) rf.push(x, sink);
  rf.flush(sink);
  return out;
}

std::vector<std::pair<double, double>> sorted(const std::vector<HalfCycle>& v) {
  std::vector<std::pair<double, double>> out;
  for (const auto& h : v) out.emplace_back(h.depth, h.mean);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Rainflow, StandardTextbookHistory) {
  // Classic load history; expected counts: range 3 ×0.5, 4 ×1.5, 6 ×0.5, 8 ×1, 9 ×0.5.
  const auto hc = stream_rainflow({-2, 1, -3, 5, -1, 3, -4, 4, -2});
  std::map<double, double> cycles;
  for (const auto& h : hc) cycles[h.depth] += 0.5;
  EXPECT_EQ(cycles, (std::map<double, double>{{3, 0.5}, {4, 1.5}, {6, 0.5}, {8, 1.0}, {9, 0.5}}));
}

TEST(Rainflow, StreamingMatchesBatchOnRandomHistories) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> len(2, 400);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> h;
    double x = u(rng);
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      // Random walk with plateaus and monotone runs.
      const double r = u(rng);
      if (r < 0.1) {
      } else if (r < 0.55) {
        x = std::min(1.0, x + 0.1 * u(rng));
      } else {
        x = std::max(0.0, x - 0.1 * u(rng));
      }
      h.push_back(x);
    }
    EXPECT_EQ(sorted(stream_rainflow(h)), sorted(batch_rainflow(h))) << "trial " << trial;
  }
}

TEST(Rainflow, MonotoneRampIsOneHalfCycle) {
  std::vector<double> h;
  for (int i = 0; i <= 100; ++i) h.push_back(0.1 + 0.008 * i);
  const auto hc = stream_rainflow(h);
  ASSERT_EQ(hc.size(), 1u);
  EXPECT_NEAR(hc[0].depth, 0.8, 1e-12);
  EXPECT_NEAR(hc[0].mean, 0.5, 1e-12);
}

TEST(CalendarAging, LinearInTime) {
  AgingState a;
  a = calendar_step(a, 0.5, 25.0, 100.0, cfg().plant->calendar);
  const double one = 1.0 - a.c_norm;
  a = calendar_step(a, 0.5, 25.0, 100.0, cfg().plant->calendar);
  EXPECT_NEAR(1.0 - a.c_norm, 2.0 * one, 1e-15);
  EXPECT_DOUBLE_EQ(a.elapsed_days, 200.0);
  EXPECT_GT(a.r_norm, 1.0);
}

TEST(CalendarAging, EolAtFullChargeAndFortyDegrees) {
  AgingState a;
  int day = 0;
  while (a.c_norm > kEolCapacity && day < 5000) {
    a = calendar_step(a, 1.0, 40.0, 1.0, cfg().plant->calendar);
    ++day;
  }
  EXPECT_GE(day, 431);
  EXPECT_LE(day, 589);
  EXPECT_EQ(eol_check(a), EolStatus::CapacityEOL);
}

TEST(CalendarAging, HotStorageHitsResistanceEolFirst) {
  AgingState a;
  while (eol_check(a) == EolStatus::OK) a = calendar_step(a, 0.66, 60.0, 1.0, cfg().plant->calendar);
  EXPECT_EQ(eol_check(a), EolStatus::ResistanceEOL);
  EXPECT_GE(a.elapsed_days, 200.0);
  EXPECT_LE(a.elapsed_days, 300.0);
}

TEST(CalendarAging, NegativeIntervalRejected) {
  EXPECT_THROW(calendar_step(AgingState{}, 0.5, 25.0, -1.0, cfg().plant->calendar), std::invalid_argument);
}

TEST(CycleAging, EolAtEightyPercentDepth) {
  AgingState a = cycle_accumulate(AgingState{}, 0.1, cfg().plant->cycle);
  for (int k = 0; a.c_norm > kEolCapacity && k < 100000; ++k) {
    a = cycle_accumulate(std::move(a), k % 2 == 0 ? 0.9 : 0.1, cfg().plant->cycle);
  }
  EXPECT_NEAR(a.eqfc, 3634.0, 36.34);
  EXPECT_EQ(eol_check(a), EolStatus::CapacityEOL);
}

TEST(CycleAging, EolAtNinetyFivePercentDepth) {
  AgingState a = cycle_accumulate(AgingState{}, 0.025, cfg().plant->cycle);
  for (int k = 0; a.c_norm > kEolCapacity && k < 100000; ++k) {
    a = cycle_accumulate(std::move(a), k % 2 == 0 ? 0.975 : 0.025, cfg().plant->cycle);
  }
  EXPECT_GE(a.eqfc, 2649.0);
  EXPECT_LE(a.eqfc, 2849.0);
}

TEST(CycleAging, EqfcCountsThroughput) {
  // Ten full 0.2 swings: 10 · 2 · 0.2 / 2 = 2 EQFC.
  AgingState a = cycle_accumulate(AgingState{}, 0.5, cfg().plant->cycle);
  for (int k = 0; k < 20; ++k) a = cycle_accumulate(std::move(a), k % 2 == 0 ? 0.7 : 0.5, cfg().plant->cycle);
  a = flush_cycles(std::move(a), cfg().plant->cycle);
  EXPECT_NEAR(a.eqfc, 2.0, 1e-12);
}

TEST(Aging, ContributionsSuperposeExactly) {
  const auto& cal = cfg().plant->calendar;
  const auto& cyc = cfg().plant->cycle;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  AgingState both, cal_only, cyc_only;
  for (int k = 0; k < 5000; ++k) {
    const double soc = u(rng);
    both = cycle_accumulate(std::move(both), soc, cyc);
    cyc_only = cycle_accumulate(std::move(cyc_only), soc, cyc);
    if (k % 60 == 59) {
      both = calendar_step(std::move(both), soc, 35.0, 1.0 / 24.0, cal);
      cal_only = calendar_step(std::move(cal_only), soc, 35.0, 1.0 / 24.0, cal);
    }
  }
  EXPECT_EQ(both.calendar_fade, cal_only.calendar_fade);
  EXPECT_EQ(both.cycle_fade, cyc_only.cycle_fade);
  EXPECT_EQ(both.calendar_growth, cal_only.calendar_growth);
  EXPECT_EQ(both.cycle_growth, cyc_only.cycle_growth);
  EXPECT_EQ(both.c_norm, 1.0 - (cal_only.calendar_fade + cyc_only.cycle_fade));
  EXPECT_EQ(both.r_norm, 1.0 + (cal_only.calendar_growth + cyc_only.cycle_growth));
}

TEST(Aging, EolStatusCombinations) {
  AgingState a;
  a.calendar_fade = 0.25;
  a.calendar_growth = 1.2;
  detail::refresh_norms(a);
  EXPECT_EQ(eol_check(a), EolStatus::Both);
  a.calendar_growth = 0.0;
  detail::refresh_norms(a);
  EXPECT_EQ(eol_check(a), EolStatus::CapacityEOL);
  EXPECT_STREQ(to_string(EolStatus::ResistanceEOL), "ResistanceEOL");
}

TEST(Aging, InitialStateCarriesPriorAging) {
  const auto a = make_aging_state(0.9, 1.3);
  EXPECT_DOUBLE_EQ(a.c_norm, 0.9);
  EXPECT_DOUBLE_EQ(a.r_norm, 1.3);
  EXPECT_EQ(a.calendar_fade, 0.0);
  EXPECT_THROW(make_aging_state(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(make_aging_state(1.0, 0.9), std::invalid_argument);
}
