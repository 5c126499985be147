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

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tdu/common/error.h"

namespace tdu::analysis {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Throws kSingularFit
/// unless at least two distinct x values are present.
LinearFit linear_fit(std::span<const std::pair<double, double>> points);

struct BodePoint {
  double amplitude = 0.0;  // rad/s
  double frequency = 0.0;  // Hz
  double gain_db = 0.0;
  double phase_deg = 0.0;  // lag negative, in (-180, 180]
};

struct GainPhase {
  double gain_db = 0.0;
  double phase_deg = 0.0;
};

/// Projects both signals onto {sin(2 pi f t), cos(2 pi f t)} by least
/// squares and compares the fitted sinusoids. All three series share `t`.
///
/// Throws kInsufficientData when the record is shorter than ten cycles or
/// sampled at or below ten times `freq`, and kNoExcitation when the
/// reference amplitude is negligible.
GainPhase gain_phase_at(std::span<const double> t, std::span<const double> reference,
                        std::span<const double> measured, double freq);

/// `n` geometrically spaced values from `lo` to `hi`, endpoints exact.
std::vector<double> log_space_grid(double lo, double hi, int n);

/// Removes a background level from a measurement in the energy domain.
/// Throws kNonPhysical when `l_meas` <= `l_room`.
double leq_subtract(double l_meas, double l_room);

/// 10 log10 of the summed energies. Throws kInsufficientData when empty.
double energetic_add(std::span<const double> levels);

struct SoundLevel {
  double level_db = 0.0;
  double window = 0.0;  // s
};

/// Time between the `start` and `stop` crossings of a temperature log. The
/// crossing direction follows from the sign of stop - start; both crossings
/// are linearly interpolated and `stop` is searched after `start`.
///
/// Throws NotReachedError carrying the last temperature if either crossing
/// is missing.
double time_to_threshold(std::span<const double> t, std::span<const double> temp,
                         double start, double stop);

/// Elapsed time from the first sample until `voltage` <= `cutoff`, linearly
/// interpolated. Throws kInsufficientData if the log starts at or below the
/// cutoff and NotReachedError if it never gets there.
double runtime_from_log(std::span<const double> t, std::span<const double> voltage,
                        double cutoff);

struct TorqueStats {
  double mean = 0.0;
  double sd = 0.0;  // population
};

TorqueStats torque_stats(std::span<const double> samples);

}  // namespace tdu::analysis
