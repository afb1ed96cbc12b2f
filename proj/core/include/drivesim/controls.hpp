#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drivesim/geometry.hpp"

namespace drivesim {

enum class ControlKind { TrafficLight, StopSign, YieldSign };
enum class LightState { Red, Yellow, Green, NotApplicable };

struct ProgramPhase {
  LightState state = LightState::Green;
  std::int64_t duration = 1;  // steps, >= 1

  friend bool operator==(const ProgramPhase&, const ProgramPhase&) = default;
};

// A rectangle with internal state. The simulator tracks the state; it never enforces it.
struct TrafficControl {
  std::string id;
  OrientedRect rect;
  ControlKind kind = ControlKind::TrafficLight;
  LightState state = LightState::NotApplicable;
  std::vector<ProgramPhase> program;  // cyclic; empty for signs

  friend bool operator==(const TrafficControl&, const TrafficControl&) = default;
};

// Throws ConfigError on zero/negative durations or a program attached to a sign.
void validate_control(const TrafficControl& c);

// State a cyclic program shows at `step_index`.
LightState program_state(const std::vector<ProgramPhase>& program, std::int64_t step_index);

// Every light takes the state its program dictates at `step_index`; signs stay n/a.
std::vector<TrafficControl> advance_controls(std::vector<TrafficControl> controls,
                                             std::int64_t step_index);

std::string_view to_string(ControlKind k);
std::string_view to_string(LightState s);
ControlKind control_kind_from_string(std::string_view s);
LightState light_state_from_string(std::string_view s);

}  // namespace drivesim
