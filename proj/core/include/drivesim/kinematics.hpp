#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "drivesim/geometry.hpp"

namespace drivesim {

inline constexpr double kDefaultDt = 0.1;

struct DynamicState {
  Pose2 pose;
  double speed = 0.0;

  DynamicState() = default;
  DynamicState(double x, double y, double psi, double v) : pose(x, y, psi), speed(v) {}
  DynamicState(const Pose2& p, double v) : pose(p), speed(v) {}

  std::array<double, 4> as_array() const { return {pose.x, pose.y, pose.psi(), speed}; }
  static DynamicState from_array(std::span<const double> v);

  friend bool operator==(const DynamicState&, const DynamicState&) = default;
};

struct AgentAttributes {
  double length = 4.5;
  double width = 1.8;
  double rear_axis_offset = 1.5;

  friend bool operator==(const AgentAttributes&, const AgentAttributes&) = default;
};

// Throws ConfigError unless length > 0, width > 0 and 0 < rear_axis_offset < length / 2.
void validate_attributes(const AgentAttributes& a);

inline OrientedRect footprint(const AgentAttributes& a, const DynamicState& s) {
  return {s.pose, a.length, a.width};
}

struct BicycleLimits {
  double max_steering = 0.3;
  double min_acceleration = -1.0;
  double max_acceleration = 1.0;

  friend bool operator==(const BicycleLimits&, const BicycleLimits&) = default;
};

class KinematicModel {
 public:
  enum class Kind { Bicycle, Unconstrained, Teleporting };

  static KinematicModel bicycle(BicycleLimits limits = {});
  static KinematicModel unconstrained() { return KinematicModel(Kind::Unconstrained, {}); }
  static KinematicModel teleporting() { return KinematicModel(Kind::Teleporting, {}); }

  Kind kind() const { return kind_; }
  const BicycleLimits& limits() const { return limits_; }
  // Bicycle: [steering, acceleration]. Unconstrained: [dx, dy, dpsi, dv]. Teleporting:
  // [x, y, psi, v].
  std::size_t action_dim() const { return kind_ == Kind::Bicycle ? 2 : 4; }

  friend bool operator==(const KinematicModel&, const KinematicModel&) = default;

 private:
  KinematicModel(Kind kind, BicycleLimits limits) : kind_(kind), limits_(limits) {}
  Kind kind_;
  BicycleLimits limits_;
};

std::string_view to_string(KinematicModel::Kind k);

using Action = std::vector<double>;

// Advances one agent by dt. Bicycle actions outside the limits are clipped; `clipped`
// reports whether that happened.
DynamicState step(const KinematicModel& model, const AgentAttributes& attrs,
                  const DynamicState& s, std::span<const double> action, double dt,
                  bool* clipped = nullptr);

// Action that best reproduces `future` from `current` in one step.
Action fit_action(const KinematicModel& model, const AgentAttributes& attrs,
                  const DynamicState& current, const DynamicState& future, double dt);

// Row-major 4 x (4 + action_dim) Jacobian of step with respect to (state, action).
struct Jacobian {
  std::size_t rows = 4;
  std::size_t cols = 0;
  std::vector<double> data;

  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Closed-form Jacobian; Bicycle and Unconstrained only, evaluated with clipping ignored.
Jacobian analytic_jacobian(const KinematicModel& model, const AgentAttributes& attrs,
                           const DynamicState& s, std::span<const double> action, double dt);

// Central-difference Jacobian of the unclipped step.
Jacobian numeric_jacobian(const KinematicModel& model, const AgentAttributes& attrs,
                          const DynamicState& s, std::span<const double> action, double dt,
                          double h = 1e-5);

// Max elementwise |analytic - numeric|.
double jacobian_check(const KinematicModel& model, const AgentAttributes& attrs,
                      const DynamicState& s, std::span<const double> action, double dt);

}  // namespace drivesim
