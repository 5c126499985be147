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
#include <deque>
#include <memory>
#include <optional>

#include "tdu/codec/frame_codec.h"
#include "tdu/hal/drive.h"
#include "tdu/hal/sim_backend.h"

namespace tdu::hal {

/// Transport below the register protocol.
class FrameLink {
 public:
  virtual ~FrameLink() = default;

  virtual void transmit(const codec::Frame& frame) = 0;
  /// Next frame from the drives, if any has arrived.
  virtual std::optional<codec::Frame> receive() = 0;
  /// Advances the drives by one control period.
  virtual void tick() = 0;
  virtual double now() const = 0;
  virtual double control_period() const = 0;
};

/// Drive-side firmware model: decodes register frames, applies them to a
/// SimBackend and answers telemetry requests. SetMode stages a mode; the
/// following SetTarget latches the pair.
class DriveEmulator {
 public:
  explicit DriveEmulator(SimBackend& drive);

  /// Handles one inbound frame, appending any responses to `replies`.
  /// Malformed or rejected frames are counted and dropped.
  void Handle(const codec::Frame& frame, std::deque<codec::Frame>& replies);

  int rejected_frames() const { return rejected_; }

 private:
  void Apply(const codec::RegisterMessage& msg, std::deque<codec::Frame>& replies);

  SimBackend& drive_;
  std::array<DriveMode, 2> staged_{DriveMode::kIdle, DriveMode::kIdle};
  std::array<PidGains, 2> velocity_gains_;
  std::array<PidGains, 2> position_gains_;
  int rejected_ = 0;
};

/// In-process link straight into a DriveEmulator. Frames can be dropped on
/// request to exercise timeout handling.
class LoopbackLink final : public FrameLink {
 public:
  explicit LoopbackLink(SimBackend& drive);

  void transmit(const codec::Frame& frame) override;
  std::optional<codec::Frame> receive() override;
  void tick() override { drive_.tick(); }
  double now() const override { return drive_.now(); }
  double control_period() const override { return drive_.control_period(); }

  /// Silently discards the next `count` transmitted frames.
  void DropNext(int count) { drop_ = count; }

  const DriveEmulator& emulator() const { return emulator_; }

 private:
  SimBackend& drive_;
  DriveEmulator emulator_;
  std::deque<codec::Frame> rx_;
  int drop_ = 0;
};

/// Per-motor command limits the host enforces before anything reaches the
/// wire.
struct DriveLimits {
  std::array<double, 2> peak_torque{3.0, 3.0};  // N*m
  double max_velocity = 100.0;                  // rad/s
};

/// Drive implementation that speaks only register frames.
class FrameBackend final : public Drive {
 public:
  FrameBackend(FrameLink& link, DriveLimits limits);

  Ack send_command(const DriveCommand& cmd) override;
  void set_gains(MotorId motor, DriveMode loop, const PidGains& gains) override;
  TelemetrySample sample(MotorId motor) override;
  void set_fans(bool on) override;
  void tick() override { link_.tick(); }
  double now() const override { return link_.now(); }
  double control_period() const override { return link_.control_period(); }
  std::string_view backend_id() const override { return "frame"; }

 private:
  void Send(MotorId motor, codec::Body body);

  FrameLink& link_;
  DriveLimits limits_;
};

/// A frame backend bundled with the simulated drives and bench it talks to.
struct FrameRig {
  std::unique_ptr<SimBackend> sim;
  std::unique_ptr<LoopbackLink> link;
  std::unique_ptr<FrameBackend> drive;
};

FrameRig MakeFrameRig(sim::PlantParams params, DriveSettings settings,
                      SensorNoise noise, std::uint64_t seed, bool paced = false);

}  // namespace tdu::hal
