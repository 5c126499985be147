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

namespace tdu::hal {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double integral_limit = 1.0;  // output units

  /// Throws ErrorCode::kConfig on negative gains or a non-positive limit.
  void Validate() const;

  bool operator==(const PidGains&) const = default;
};

struct PidState {
  double integral = 0.0;  // already scaled by ki, output units
  double previous_error = 0.0;
  bool has_previous = false;
  double output = 0.0;

  bool operator==(const PidState&) const = default;
};

struct PidResult {
  double output = 0.0;
  PidState state;
};

/// One step of a parallel PID. The integral is clamped to
/// +/- integral_limit and the output to +/- output_limit. The derivative is
/// taken on the error and is zero on the first step after a reset.
PidResult pid_step(double error, const PidGains& gains, const PidState& state,
                   double dt, double output_limit);

}  // namespace tdu::hal
