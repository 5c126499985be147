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

#include "tdu/hal/pid.h"

#include <algorithm>
#include <cmath>

#include "tdu/common/error.h"

namespace tdu::hal {

void PidGains::Validate() const {
  if (!(kp >= 0.0 && ki >= 0.0 && kd >= 0.0)) {
    throw Error(ErrorCode::kConfig, "PID gains must be non-negative");
  }
  if (!(integral_limit > 0.0) || !std::isfinite(integral_limit)) {
    throw Error(ErrorCode::kConfig, "PID integral_limit must be positive");
  }
}

PidResult pid_step(double error, const PidGains& gains, const PidState& state,
                   double dt, double output_limit) {
  PidResult r;
  r.state.integral = std::clamp(state.integral + gains.ki * error * dt,
                                -gains.integral_limit, gains.integral_limit);
  const double derivative =
      state.has_previous ? (error - state.previous_error) / dt : 0.0;
  r.output = std::clamp(gains.kp * error + r.state.integral + gains.kd * derivative,
                        -output_limit, output_limit);
  r.state.previous_error = error;
  r.state.has_previous = true;
  r.state.output = r.output;
  return r;
}

}  // namespace tdu::hal
