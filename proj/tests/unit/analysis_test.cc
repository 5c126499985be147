// Copyright 2026 The tdubench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tdu/analysis/analysis.h"

namespace tdu::analysis {
namespace {

using Points = std::vector<std::pair<double, double>>;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

struct Record {
  std::vector<double> t, ref, meas;
};

Record Sine(double freq, double cycles, double gain, double delay_fraction) {
  Record r;
  const double h = std::min(0.01, 1.0 / (50.0 * freq));
  const auto n = static_cast<std::size_t>(std::ceil(cycles / (freq * h)));
  const double w = 2.0 * std::numbers::pi * freq;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * h;
    r.t.push_back(t);
    r.ref.push_back(5.0 * std::sin(w * t));
    r.meas.push_back(gain * 5.0 * std::sin(w * (t - delay_fraction / freq)));
  }
  return r;
}

TEST(LinearFit, IdentityLine) {
  const Points pts{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  const LinearFit f = linear_fit(pts);
  EXPECT_DOUBLE_EQ(f.slope, 1.0);
  EXPECT_DOUBLE_EQ(f.intercept, 0.0);
  EXPECT_DOUBLE_EQ(f.r_squared, 1.0);
}

TEST(LinearFit, RecoversTorqueMapCoefficients) {
  Points pts;
  for (double x = 0.25; x <= 2.0 + 1e-12; x += 0.25) pts.emplace_back(x, 0.915 * x - 0.120);
  const LinearFit f = linear_fit(pts);
  EXPECT_NEAR(f.slope, 0.915, 1e-12);
  EXPECT_NEAR(f.intercept, -0.120, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-15);
}

TEST(LinearFit, RSquaredInUnitIntervalForNoise) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  Points pts;
  for (int i = 0; i < 50; ++i) pts.emplace_back(i % 2, n(rng));
  const LinearFit f = linear_fit(pts);
  EXPECT_GE(f.r_squared, 0.0);
  EXPECT_LE(f.r_squared, 1.0);
}

TEST(LinearFit, DegenerateXIsSingular) {
  EXPECT_EQ(CodeOf([] { linear_fit(Points{{1, 2}, {1, 3}, {1, 4}}); }), ErrorCode::kSingularFit);
  EXPECT_EQ(CodeOf([] { linear_fit(Points{}); }), ErrorCode::kSingularFit);
  EXPECT_EQ(CodeOf([] { linear_fit(Points{{1, 2}}); }), ErrorCode::kSingularFit);
}

TEST(GainPhase, IdenticalSignals) {
  const Record r = Sine(0.67, 10, 1.0, 0.0);
  const GainPhase gp = gain_phase_at(r.t, r.ref, r.ref, 0.67);
  EXPECT_NEAR(gp.gain_db, 0.0, 1e-9);
  EXPECT_NEAR(gp.phase_deg, 0.0, 1e-9);
}

TEST(GainPhase, HalfAmplitude) {
  const Record r = Sine(1.2, 10, 0.5, 0.0);
  const GainPhase gp = gain_phase_at(r.t, r.ref, r.meas, 1.2);
  EXPECT_NEAR(gp.gain_db, -6.0205999132796242, 1e-9);
  EXPECT_NEAR(gp.phase_deg, 0.0, 1e-9);
}

TEST(GainPhase, QuarterPeriodDelay) {
  const Record r = Sine(2.0, 10, 1.0, 0.25);
  const GainPhase gp = gain_phase_at(r.t, r.ref, r.meas, 2.0);
  EXPECT_NEAR(gp.gain_db, 0.0, 1e-9);
  EXPECT_NEAR(gp.phase_deg, -90.0, 1e-9);
}

TEST(GainPhase, PhaseWrapsIntoHalfOpenInterval) {
  const Record inverted = Sine(1.0, 10, -1.0, 0.0);
  EXPECT_NEAR(gain_phase_at(inverted.t, inverted.ref, inverted.meas, 1.0).phase_deg, 180.0,
              1e-9);
  const Record lag = Sine(1.0, 10, 1.0, 0.75);
  EXPECT_NEAR(gain_phase_at(lag.t, lag.ref, lag.meas, 1.0).phase_deg, 90.0, 1e-9);
}

TEST(GainPhase, SelfTestAcrossFullGrid) {
  for (double f : log_space_grid(0.1, 10.0, 20)) {
    const Record r = Sine(f, 10, 1.0, 0.0);
    const GainPhase gp = gain_phase_at(r.t, r.ref, r.ref, f);
    EXPECT_NEAR(gp.gain_db, 0.0, 1e-9) << f;
    EXPECT_NEAR(gp.phase_deg, 0.0, 1e-9) << f;
  }
}

TEST(GainPhase, RejectsShortOrCoarseRecords) {
  const Record shorter = Sine(1.0, 9, 1.0, 0.0);
  EXPECT_EQ(CodeOf([&] { gain_phase_at(shorter.t, shorter.ref, shorter.meas, 1.0); }),
            ErrorCode::kInsufficientData);
  std::vector<double> t, y;
  for (int i = 0; i < 200; ++i) {
    t.push_back(i * 0.1);
    y.push_back(std::sin(2.0 * std::numbers::pi * 1.0 * i * 0.1));
  }
  EXPECT_EQ(CodeOf([&] { gain_phase_at(t, y, y, 1.0); }), ErrorCode::kInsufficientData);
}

TEST(GainPhase, FlatReferenceHasNoExcitation) {
  Record r = Sine(1.0, 10, 1.0, 0.0);
  std::vector<double> flat(r.t.size(), 3.0);
  EXPECT_EQ(CodeOf([&] { gain_phase_at(r.t, flat, r.meas, 1.0); }), ErrorCode::kNoExcitation);
}

TEST(LogSpaceGrid, PublishedGrid) {
  const auto g = log_space_grid(0.1, 10.0, 20);
  ASSERT_EQ(g.size(), 20u);
  EXPECT_EQ(g.front(), 0.1);
  EXPECT_EQ(g.back(), 10.0);
  EXPECT_NEAR(g[1], 0.12742749857031338, 1e-15);
}

TEST(LogSpaceGrid, TwoPoints) {
  EXPECT_EQ(log_space_grid(1.0, 10.0, 2), (std::vector<double>{1.0, 10.0}));
}

TEST(LogSpaceGrid, ConstantRatio) {
  const auto g = log_space_grid(0.37, 123.0, 31);
  const double ratio = g[1] / g[0];
  for (std::size_t i = 1; i < g.size(); ++i) {
    EXPECT_GT(g[i], g[i - 1]);
    EXPECT_NEAR(g[i] / g[i - 1], ratio, 1e-12 * ratio);
  }
}

TEST(LogSpaceGrid, InvalidBounds) {
  EXPECT_THROW(log_space_grid(0.0, 1.0, 5), Error);
  EXPECT_THROW(log_space_grid(2.0, 1.0, 5), Error);
  EXPECT_THROW(log_space_grid(1.0, 2.0, 1), Error);
}

TEST(LeqSubtract, EqualEnergySource) {
  EXPECT_NEAR(leq_subtract(46.7103, 43.7), 43.700000086720372, 1e-9);
}

TEST(LeqSubtract, DirectEvaluation) {
  EXPECT_NEAR(leq_subtract(60.0, 43.7), 59.896979139792101, 1e-9);
}

TEST(LeqSubtract, AtOrBelowFloorIsNonPhysical) {
  EXPECT_EQ(CodeOf([] { leq_subtract(43.7, 43.7); }), ErrorCode::kNonPhysical);
  EXPECT_EQ(CodeOf([] { leq_subtract(40.0, 43.7); }), ErrorCode::kNonPhysical);
}

TEST(EnergeticAdd, SingleAndDouble) {
  EXPECT_DOUBLE_EQ(energetic_add(std::vector<double>{47.25}), 47.25);
  EXPECT_NEAR(energetic_add(std::vector<double>{50.0, 50.0}), 53.010299956639813, 1e-9);
  EXPECT_EQ(CodeOf([] { energetic_add(std::vector<double>{}); }), ErrorCode::kInsufficientData);
}

TEST(EnergeticAdd, SubtractInvertsAdd) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> level(0.0, 120.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = level(rng);
    const double b = std::clamp(level(rng), a - 20.0, a + 30.0);
    EXPECT_NEAR(leq_subtract(energetic_add(std::vector<double>{a, b}), a), b, 1e-9)
        << a << " " << b;
  }
}

std::pair<std::vector<double>, std::vector<double>> ExponentialRise(double h, double horizon) {
  std::vector<double> t, y;
  for (double s = 0.0; s <= horizon + 1e-9; s += h) {
    t.push_back(s);
    y.push_back(23.0 + 70.0 * (1.0 - std::exp(-s / 300.0)));
  }
  return {t, y};
}

TEST(TimeToThreshold, ExponentialRiseWithinOneSample) {
  const auto [t, y] = ExponentialRise(1.0, 2000.0);
  const double analytic = 505.06376537634662 - 31.608154697347885;
  EXPECT_NEAR(time_to_threshold(t, y, 30.0, 80.0), analytic, 1.0);
}

TEST(TimeToThreshold, FallingDirection) {
  std::vector<double> t, y;
  for (int s = 0; s <= 3000; ++s) {
    t.push_back(s);
    y.push_back(23.0 + 57.0 * std::exp(-s / 405.0));
  }
  EXPECT_NEAR(time_to_threshold(t, y, 80.0, 30.0), -405.0 * std::log(7.0 / 57.0), 1.0);
}

TEST(TimeToThreshold, FlatLogNotReached) {
  const std::vector<double> t{0, 1, 2, 3};
  const std::vector<double> y{25, 25, 25, 25};
  try {
    time_to_threshold(t, y, 30.0, 80.0);
    FAIL();
  } catch (const NotReachedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotReached);
    EXPECT_EQ(e.last_value(), 25.0);
  }
}

TEST(TimeToThreshold, InvariantUnderResampling) {
  const auto [t1, y1] = ExponentialRise(1.0, 2000.0);
  const auto [t2, y2] = ExponentialRise(0.5, 2000.0);
  const auto [t4, y4] = ExponentialRise(0.25, 2000.0);
  const double base = time_to_threshold(t1, y1, 30.0, 80.0);
  EXPECT_NEAR(time_to_threshold(t2, y2, 30.0, 80.0), base, 1.0);
  EXPECT_NEAR(time_to_threshold(t4, y4, 30.0, 80.0), base, 1.0);
}

TEST(RuntimeFromLog, LinearDischarge) {
  std::vector<double> t, v;
  for (int s = 0; s <= 1000; ++s) {
    t.push_back(s);
    v.push_back(29.1 - 11.6 * s / 1000.0);
  }
  EXPECT_NEAR(runtime_from_log(t, v, 17.5), 1000.0, 1e-9);
}

TEST(RuntimeFromLog, InterpolatesAndResamples) {
  auto log = [](double h) {
    std::vector<double> t, v;
    for (double s = 0.0; s <= 900.0 + 1e-9; s += h) {
      t.push_back(100.0 + s);
      v.push_back(29.1 - 0.015 * s);
    }
    return std::pair{t, v};
  };
  const auto [t1, v1] = log(7.0);
  const auto [t2, v2] = log(3.5);
  const double expected = 11.6 / 0.015;
  EXPECT_NEAR(runtime_from_log(t1, v1, 17.5), expected, 1e-9);
  EXPECT_NEAR(runtime_from_log(t2, v2, 17.5), expected, 1e-9);
}

TEST(RuntimeFromLog, Errors) {
  const std::vector<double> t{0, 1, 2};
  EXPECT_EQ(CodeOf([&] { runtime_from_log(t, std::vector<double>{29, 28, 27}, 17.5); }),
            ErrorCode::kNotReached);
  EXPECT_EQ(CodeOf([&] { runtime_from_log(t, std::vector<double>{17, 16, 15}, 17.5); }),
            ErrorCode::kInsufficientData);
}

TEST(TorqueStats, ConstantSeries) {
  const TorqueStats s = torque_stats(std::vector<double>(10, 0.3));
  EXPECT_DOUBLE_EQ(s.mean, 0.3);
  EXPECT_NEAR(s.sd, 0.0, 1e-15);
}

TEST(TorqueStats, SquareWaveUsesPopulationDeviation) {
  std::vector<double> wave;
  for (int i = 0; i < 100; ++i) wave.push_back(i % 2 ? 0.7 : -0.7);
  const TorqueStats s = torque_stats(wave);
  EXPECT_NEAR(s.mean, 0.0, 1e-15);
  EXPECT_NEAR(s.sd, 0.7, 1e-15);
  EXPECT_EQ(CodeOf([] { torque_stats(std::vector<double>{}); }), ErrorCode::kInsufficientData);
}

}  // namespace
}  // namespace tdu::analysis
