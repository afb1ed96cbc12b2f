#include "drivesim/controls.hpp"

#include <numeric>

#include "drivesim/errors.hpp"

namespace drivesim {

void validate_control(const TrafficControl& c) {
  if (c.id.empty()) throw ConfigError("control without id");
  if (!(c.rect.length > 0.0) || !(c.rect.width > 0.0)) {
    throw ConfigError("control " + c.id + " has a degenerate rectangle");
  }
  if (c.kind != ControlKind::TrafficLight) {
    if (!c.program.empty()) throw ConfigError("sign " + c.id + " cannot carry a program");
    return;
  }
  if (c.program.empty()) throw ConfigError("traffic light " + c.id + " has no program");
  for (const auto& phase : c.program) {
    if (phase.duration < 1) throw ConfigError("traffic light " + c.id + " has a phase < 1 step");
    if (phase.state == LightState::NotApplicable) {
      throw ConfigError("traffic light " + c.id + " has an n/a phase");
    }
  }
}

LightState program_state(const std::vector<ProgramPhase>& program, std::int64_t step_index) {
  if (program.empty()) return LightState::NotApplicable;
  const std::int64_t cycle = std::accumulate(
      program.begin(), program.end(), std::int64_t{0},
      [](std::int64_t acc, const ProgramPhase& p) { return acc + p.duration; });
  std::int64_t t = step_index % cycle;
  if (t < 0) t += cycle;
  for (const auto& phase : program) {
    if (t < phase.duration) return phase.state;
    t -= phase.duration;
  }
  return program.back().state;
}

std::vector<TrafficControl> advance_controls(std::vector<TrafficControl> controls,
                                             std::int64_t step_index) {
  for (auto& c : controls) {
    c.state = c.kind == ControlKind::TrafficLight ? program_state(c.program, step_index)
                                                  : LightState::NotApplicable;
  }
  return controls;
}

std::string_view to_string(ControlKind k) {
  switch (k) {
    case ControlKind::TrafficLight: return "traffic_light";
    case ControlKind::StopSign: return "stop_sign";
    case ControlKind::YieldSign: return "yield_sign";
  }
  return "unknown";
}

std::string_view to_string(LightState s) {
  switch (s) {
    case LightState::Red: return "red";
    case LightState::Yellow: return "yellow";
    case LightState::Green: return "green";
    case LightState::NotApplicable: return "n/a";
  }
  return "unknown";
}

ControlKind control_kind_from_string(std::string_view s) {
  if (s == "traffic_light") return ControlKind::TrafficLight;
  if (s == "stop_sign") return ControlKind::StopSign;
  if (s == "yield_sign") return ControlKind::YieldSign;
  throw ConfigError("unknown control kind '" + std::string(s) + "'");
}

LightState light_state_from_string(std::string_view s) {
  if (s == "red") return LightState::Red;
  if (s == "yellow") return LightState::Yellow;
  if (s == "green") return LightState::Green;
  if (s == "n/a") return LightState::NotApplicable;
  throw ConfigError("unknown light state '" + std::string(s) + "'");
}

}  // namespace drivesim
