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

#include "tdu/sim/plant.h"

#include <cmath>
#include <sstream>

namespace tdu::sim {
namespace {

// Velocity scale over which redirect-pulley friction changes direction.
constexpr double kFrictionSmoothing = 0.05;  // rad/s

double Sign(double x) { return (x > 0.0) - (x < 0.0); }

// Integrates one rotor given every torque except stiction.
void IntegrateRotor(MotorState& m, const MotorParams& p, double drive,
                    double inertia, double dt) {
  if (p.stiction > 0.0) {
    if (m.velocity == 0.0 && std::abs(drive) <= p.stiction) return;
    const double direction = m.velocity != 0.0 ? Sign(m.velocity) : Sign(drive);
    const double next = m.velocity + dt * (drive - p.stiction * direction) / inertia;
    m.velocity = (m.velocity != 0.0 && Sign(next) != Sign(m.velocity)) ? 0.0 : next;
  } else {
    m.velocity += dt * drive / inertia;
  }
  m.position += dt * m.velocity;
}

void CheckFinite(const PlantState& s) {
  for (std::size_t i = 0; i < s.motors.size(); ++i) {
    const auto& m = s.motors[i];
    if (!std::isfinite(m.position) || !std::isfinite(m.velocity) ||
        !std::isfinite(m.applied_torque) || !std::isfinite(m.stator_temp)) {
      std::ostringstream msg;
      msg << "non-finite state on motor " << i + 1 << " at t=" << s.sim_time
          << " (position " << m.position << ", velocity " << m.velocity
          << ", torque " << m.applied_torque << ", temp " << m.stator_temp
          << ")";
      throw Error(ErrorCode::kPlantFault, msg.str());
    }
  }
}

}  // namespace

PlantState InitialState(const PlantParams& params) {
  PlantState s;
  for (auto& m : s.motors) m.stator_temp = params.thermal.ambient;
  s.soc = 1.0;
  s.pack_voltage = params.battery.VoltageAt(1.0);
  return s;
}

PlantState step_mechanics(const PlantState& state,
                          const std::array<double, 2>& torque_commands,
                          const Fixture& fixture, const PlantParams& params,
                          double dt) {
  PlantState next = state;
  const double r = params.pulley_radius;

  for (std::size_t i = 0; i < 2; ++i) {
    const TorqueResult t = applied_torque(torque_commands[i], params.motors[i]);
    next.motors[i].applied_torque = t.torque;
    next.motors[i].saturated = t.saturated;
  }

  double coupled_tension = 0.0;
  if (fixture.coupled) {
    const auto& m1 = state.motors[0];
    const auto& m2 = state.motors[1];
    const double stretch = r * (m1.position + m2.position);
    const double stretch_rate = r * (m1.velocity + m2.velocity);
    coupled_tension = std::max(
        0.0, params.cable_stiffness * stretch + params.cable_damping * stretch_rate);
  }

  for (std::size_t i = 0; i < 2; ++i) {
    const MotorParams& p = params.motors[i];
    MotorState& m = next.motors[i];
    const double cog = cogging_torque(state.motors[i].position, p);
    double inertia = p.rotor_inertia;
    double load = 0.0;

    if (fixture.coupled) {
      m.cable_tension = coupled_tension;
      load = coupled_tension * r;
    } else if (std::holds_alternative<AnchoredCable>(fixture.attachments[i])) {
      m.velocity = 0.0;
      m.cable_tension = std::max(0.0, m.applied_torque + cog) / r;
      continue;
    } else if (const auto* mass = std::get_if<HangingMass>(&fixture.attachments[i])) {
      const double weight = mass->mass * params.gravity;
      const double friction =
          params.redirect_friction * std::tanh(m.velocity / kFrictionSmoothing);
      m.cable_tension = weight * (1.0 + friction);
      load = m.cable_tension * r;
      inertia += mass->mass * r * r;
    } else {
      m.cable_tension = 0.0;
    }

    const double drive =
        m.applied_torque + cog - p.viscous_friction * m.velocity - load;
    IntegrateRotor(m, p, drive, inertia, dt);
  }

  next.sim_time = state.sim_time + dt;
  CheckFinite(next);
  return next;
}

Plant::Plant(PlantParams params)
    : params_(std::move(params)), state_(InitialState(params_)) {
  params_.Validate();
  decay_fans_on_ = std::exp(-params_.dt / params_.thermal.TimeConstant(true));
  decay_fans_off_ = std::exp(-params_.dt / params_.thermal.TimeConstant(false));
}

void Plant::Step(const std::array<double, 2>& torque_commands) {
  const double dt = params_.dt;
  const std::array<double, 2> commands =
      state_.powered ? torque_commands : std::array<double, 2>{0.0, 0.0};
  if (!state_.powered) state_.fans_on = false;

  PlantState next = step_mechanics(state_, commands, fixture_, params_, dt);

  const bool fans = next.fans_on;
  const double r_th =
      fans ? params_.thermal.r_th_fans_on : params_.thermal.r_th_fans_off;
  const double decay = fans ? decay_fans_on_ : decay_fans_off_;
  std::array<double, 2> torques{};
  std::array<double, 2> speeds{};
  for (std::size_t i = 0; i < 2; ++i) {
    MotorState& m = next.motors[i];
    const double loss = copper_loss(m.applied_torque, params_.motors[i]);
    const double steady = params_.thermal.ambient + loss * r_th;
    m.stator_temp = steady + (m.stator_temp - steady) * decay;
    torques[i] = m.applied_torque;
    speeds[i] = m.velocity;
  }

  if (next.powered) {
    last_power_ = electrical_power(torques, speeds, params_.motors,
                                   params_.battery.idle_power);
    const BatteryStepResult b =
        battery_step(next.soc, last_power_, dt, params_.battery);
    next.soc = b.soc;
    next.pack_voltage = b.voltage;
    if (b.depleted) {
      next.powered = false;
      next.fans_on = false;
    }
  } else {
    last_power_ = 0.0;
  }

  state_ = next;
  CheckFinite(state_);

  if (meter_running_) {
    meter_energy_ += SoundEnergy() * dt;
    meter_time_ += dt;
  }
}

void Plant::Recharge() {
  state_.soc = 1.0;
  state_.pack_voltage = params_.battery.VoltageAt(1.0);
  state_.powered = true;
}

double Plant::SoundEnergy() const {
  const auto& a = params_.acoustic;
  double energy = std::pow(10.0, a.room_floor / 10.0);
  if (state_.fans_on) energy += std::pow(10.0, a.fans_level / 10.0);
  for (const auto& m : state_.motors) {
    const double speed = std::abs(m.velocity);
    if (speed > 0.0) energy += std::pow(10.0, motor_source_level(speed, a) / 10.0);
  }
  return energy;
}

double Plant::SoundLevel() const { return 10.0 * std::log10(SoundEnergy()); }

void Plant::StartSoundMeter() {
  meter_running_ = true;
  meter_energy_ = 0.0;
  meter_time_ = 0.0;
}

double Plant::SoundMeterLeq() const {
  if (!meter_running_ || meter_time_ <= 0.0) {
    throw Error(ErrorCode::kProtocol, "sound meter has not integrated any time");
  }
  return 10.0 * std::log10(meter_energy_ / meter_time_);
}

}  // namespace tdu::sim
