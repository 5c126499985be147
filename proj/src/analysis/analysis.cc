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

#include "tdu/analysis/analysis.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tdu::analysis {
namespace {

void RequireSameLength(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kInsufficientData,
                std::string(what) + ": series lengths differ (" + std::to_string(a) +
                    " vs " + std::to_string(b) + ")");
  }
}

struct Sinusoid {
  double sin_coeff;
  double cos_coeff;
};

Sinusoid Project(std::span<const double> t, std::span<const double> y, double w) {
  double ss = 0, sc = 0, cc = 0, ys = 0, yc = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double s = std::sin(w * t[i]);
    const double c = std::cos(w * t[i]);
    ss += s * s;
    sc += s * c;
    cc += c * c;
    ys += y[i] * s;
    yc += y[i] * c;
  }
  const double det = ss * cc - sc * sc;
  if (!(std::abs(det) > 1e-12 * ss * cc)) {
    throw Error(ErrorCode::kSingularFit, "sin/cos basis is degenerate on this grid");
  }
  return {(ys * cc - yc * sc) / det, (yc * ss - ys * sc) / det};
}

double WrapDegrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r;
}

// First index at or after `from` where the series reaches `level`.
std::size_t FindCrossing(std::span<const double> y, std::size_t from, double level,
                         bool rising) {
  for (std::size_t i = from; i < y.size(); ++i) {
    if (rising ? y[i] >= level : y[i] <= level) return i;
  }
  return y.size();
}

double Interpolate(std::span<const double> t, std::span<const double> y, std::size_t i,
                   double level) {
  if (i == 0 || y[i] == y[i - 1]) return t[i];
  const double frac = (level - y[i - 1]) / (y[i] - y[i - 1]);
  return t[i - 1] + frac * (t[i] - t[i - 1]);
}

}  // namespace

LinearFit linear_fit(std::span<const std::pair<double, double>> points) {
  const auto n = static_cast<double>(points.size());
  double mx = 0, my = 0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  if (points.empty()) {
    throw Error(ErrorCode::kSingularFit, "linear fit needs at least two distinct x");
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::kSingularFit, "linear fit needs at least two distinct x");
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (const auto& [x, y] : points) {
    const double r = y - (fit.slope * x + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

GainPhase gain_phase_at(std::span<const double> t, std::span<const double> reference,
                        std::span<const double> measured, double freq) {
  RequireSameLength(t.size(), reference.size(), "gain_phase_at");
  RequireSameLength(t.size(), measured.size(), "gain_phase_at");
  if (!(freq > 0.0) || !std::isfinite(freq)) {
    throw Error(ErrorCode::kOutOfRange, "gain_phase_at: frequency must be positive");
  }
  if (t.size() < 2) {
    throw Error(ErrorCode::kInsufficientData, "gain_phase_at: need at least two samples");
  }
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(h > 0.0) || 1.0 / h <= 10.0 * freq) {
    throw Error(ErrorCode::kInsufficientData,
                "gain_phase_at: sample rate must exceed ten times the frequency");
  }
  const double cycles = static_cast<double>(t.size()) * h * freq;
  if (cycles < 10.0 - 1e-6) {
    throw Error(ErrorCode::kInsufficientData,
                "gain_phase_at: record spans " + std::to_string(cycles) +
                    " cycles, need 10");
  }
  const double w = 2.0 * std::numbers::pi * freq;
  const Sinusoid ref = Project(t, reference, w);
  const Sinusoid meas = Project(t, measured, w);
  const double ref_amp = std::hypot(ref.sin_coeff, ref.cos_coeff);
  const double meas_amp = std::hypot(meas.sin_coeff, meas.cos_coeff);
  double scale = 0.0;
  for (double v : reference) scale = std::max(scale, std::abs(v));
  if (!(ref_amp > 1e-9 * std::max(scale, 1.0))) {
    throw Error(ErrorCode::kNoExcitation, "reference has no component at the test frequency");
  }
  if (!(meas_amp > 0.0)) {
    throw Error(ErrorCode::kNoExcitation, "measured signal has no component at the test frequency");
  }
  const double phase_ref = std::atan2(ref.cos_coeff, ref.sin_coeff);
  const double phase_meas = std::atan2(meas.cos_coeff, meas.sin_coeff);
  GainPhase out;
  out.gain_db = 20.0 * std::log10(meas_amp / ref_amp);
  out.phase_deg = WrapDegrees((phase_meas - phase_ref) * 180.0 / std::numbers::pi);
  return out;
}

std::vector<double> log_space_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && lo < hi && std::isfinite(hi)) || n < 2) {
    throw Error(ErrorCode::kOutOfRange,
                "log_space_grid needs 0 < lo < hi and n >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  const double span = std::log10(hi / lo);
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        lo * std::pow(10.0, span * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

double leq_subtract(double l_meas, double l_room) {
  if (!(l_meas > l_room)) {
    throw Error(ErrorCode::kNonPhysical,
                "measured level " + std::to_string(l_meas) +
                    " dB is not above the background " + std::to_string(l_room) + " dB");
  }
  return l_meas + 10.0 * std::log10(-std::expm1((l_room - l_meas) * std::log(10.0) / 10.0));
}

double energetic_add(std::span<const double> levels) {
  if (levels.empty()) {
    throw Error(ErrorCode::kInsufficientData, "energetic_add of no levels");
  }
  const double top = *std::max_element(levels.begin(), levels.end());
  double sum = 0.0;
  for (double l : levels) sum += std::pow(10.0, (l - top) / 10.0);
  return top + 10.0 * std::log10(sum);
}

double time_to_threshold(std::span<const double> t, std::span<const double> temp,
                         double start, double stop) {
  RequireSameLength(t.size(), temp.size(), "time_to_threshold");
  if (t.empty()) {
    throw Error(ErrorCode::kInsufficientData, "time_to_threshold on an empty log");
  }
  if (start == stop) {
    throw Error(ErrorCode::kOutOfRange, "time_to_threshold needs start != stop");
  }
  const bool rising = stop > start;
  const std::size_t i0 = FindCrossing(temp, 0, start, rising);
  if (i0 == temp.size()) {
    throw NotReachedError("temperature never crossed " + std::to_string(start),
                          temp.back());
  }
  const std::size_t i1 = FindCrossing(temp, i0, stop, rising);
  if (i1 == temp.size()) {
    throw NotReachedError("temperature never crossed " + std::to_string(stop),
                          temp.back());
  }
  return Interpolate(t, temp, i1, stop) - Interpolate(t, temp, i0, start);
}

double runtime_from_log(std::span<const double> t, std::span<const double> voltage,
                        double cutoff) {
  RequireSameLength(t.size(), voltage.size(), "runtime_from_log");
  if (voltage.empty() || voltage.front() <= cutoff) {
    throw Error(ErrorCode::kInsufficientData, "voltage log must start above cutoff");
  }
  const std::size_t i = FindCrossing(voltage, 0, cutoff, false);
  if (i == voltage.size()) {
    throw NotReachedError("pack never reached cutoff", voltage.back());
  }
  return Interpolate(t, voltage, i, cutoff) - t.front();
}

TorqueStats torque_stats(std::span<const double> samples) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInsufficientData, "torque_stats of no samples");
  }
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace tdu::analysis
