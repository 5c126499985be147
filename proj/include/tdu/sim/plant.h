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

#include <array>
#include <variant>

#include "tdu/sim/models.h"
#include "tdu/sim/params.h"

namespace tdu::sim {

/// No pulley on the rotor.
struct FreeRotor {
  bool operator==(const FreeRotor&) const = default;
};

/// Pulley cable tied to a crane scale: the rotor is held at stall and the
/// cable carries whatever positive torque the rotor produces.
struct AnchoredCable {
  bool operator==(const AnchoredCable&) const = default;
};

/// A mass lifted through a redirect pulley; positive rotation lifts it.
struct HangingMass {
  double mass = 0.0;  // kg

  bool operator==(const HangingMass&) const = default;
};

using Attachment = std::variant<FreeRotor, AnchoredCable, HangingMass>;

/// Test fixture around the two rotors. When `coupled` is set, one tendon
/// joins both pulleys through a redirect pulley and the per-motor
/// attachments are ignored; positive rotation of either rotor takes up
/// cable.
struct Fixture {
  std::array<Attachment, 2> attachments{FreeRotor{}, FreeRotor{}};
  bool coupled = false;

  bool operator==(const Fixture&) const = default;
};

struct MotorState {
  double position = 0.0;        // rad
  double velocity = 0.0;        // rad/s
  double applied_torque = 0.0;  // N*m
  double stator_temp = 23.0;    // degC
  double cable_tension = 0.0;   // N
  bool saturated = false;

  bool operator==(const MotorState&) const = default;
};

struct PlantState {
  std::array<MotorState, 2> motors;
  bool fans_on = false;
  bool powered = true;
  double soc = 1.0;
  double pack_voltage = 29.1;  // V
  double sim_time = 0.0;       // s

  const MotorState& motor(MotorId id) const { return motors[Index(id)]; }

  bool operator==(const PlantState&) const = default;
};

/// Rest state at ambient temperature with a full pack.
PlantState InitialState(const PlantParams& params);

/// Semi-implicit rotor integration of
///   J w' = tau_applied + tau_cog(theta) - c w - tau_load
/// for both motors under `fixture`. Commands are the drive's torque
/// requests; the torque map is applied here. Thermal, battery and time
/// fields are returned untouched except `sim_time`.
PlantState step_mechanics(const PlantState& state,
                          const std::array<double, 2>& torque_commands,
                          const Fixture& fixture, const PlantParams& params,
                          double dt);

/// The simulated TDU: rotors, stators, battery pack and microphone, stepped
/// at a fixed dt. Single owner; not thread-safe.
class Plant {
 public:
  explicit Plant(PlantParams params);

  const PlantState& state() const { return state_; }
  const PlantParams& params() const { return params_; }
  const Fixture& fixture() const { return fixture_; }

  void set_fixture(const Fixture& fixture) { fixture_ = fixture; }
  void set_fans(bool on) { state_.fans_on = on; }

  /// Advances one dt. Once the pack hits cutoff the BMS opens: commands are
  /// ignored, fans stop, and the pack no longer drains.
  void Step(const std::array<double, 2>& torque_commands);

  /// Restores a full pack and closes the BMS.
  void Recharge();

  /// Electrical draw during the last step, W.
  double last_power() const { return last_power_; }

  /// Instantaneous level at the microphone, dB.
  double SoundLevel() const;

  /// Starts integrating sound energy for an equivalent continuous level.
  void StartSoundMeter();
  /// Leq since StartSoundMeter(); requires at least one step.
  double SoundMeterLeq() const;

 private:
  double SoundEnergy() const;

  PlantParams params_;
  Fixture fixture_;
  PlantState state_;
  double decay_fans_on_;
  double decay_fans_off_;
  double last_power_ = 0.0;
  bool meter_running_ = false;
  double meter_energy_ = 0.0;
  double meter_time_ = 0.0;
};

}  // namespace tdu::sim
