#pragma once

#include <optional>
#include <string>

#include "drivesim/world.hpp"

namespace drivesim {

struct InfractionReport {
  bool collision = false;
  bool offroad = false;
  bool wrong_way = false;
  bool traffic_light = false;
  std::optional<AgentRef> collided_with;
  std::optional<int> wrong_way_lane;
  std::optional<std::string> violated_control;

  bool any_terminal() const { return collision || offroad || traffic_light; }
  friend bool operator==(const InfractionReport&, const InfractionReport&) = default;
};

// First other present agent (any type) whose footprint overlaps this one, in
// present_agents() order.
std::optional<AgentRef> check_collision(const WorldState& w, const AgentRef& agent);

// True when any footprint corner lies on no drivable triangle.
bool check_offroad(const WorldState& w, const AgentRef& agent);

// Lane id when the heading differs from the nearest lane's tangent by strictly more
// than pi/2.
std::optional<int> check_wrong_way(const WorldState& w, const AgentRef& agent,
                                   double lane_radius = kDefaultLaneRadius);

// Control id when the path prev -> current crosses a traffic light that is red now.
std::optional<std::string> check_traffic_light(const WorldState& w, const AgentRef& agent,
                                               const DynamicState& prev);

InfractionReport evaluate_infractions(const WorldState& w, const AgentRef& agent,
                                      const DynamicState& prev,
                                      double lane_radius = kDefaultLaneRadius);

}  // namespace drivesim
