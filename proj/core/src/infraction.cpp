#include "drivesim/infraction.hpp"

#include <cmath>
#include <numbers>

namespace drivesim {

namespace {

void require_present(const WorldState& w, const AgentRef& agent) {
  if (!w.is_present(agent)) throw AbsentAgent(agent.type, agent.index);
}

}  // namespace

std::optional<AgentRef> check_collision(const WorldState& w, const AgentRef& agent) {
  require_present(w, agent);
  const OrientedRect self = footprint(w.attributes(agent), w.state(agent));
  for (const auto& [type, batch] : w.agents) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!batch.present[i] || (type == agent.type && i == agent.index)) continue;
      if (rects_overlap(self, footprint(batch.attrs[i], batch.states[i]))) return AgentRef{type, i};
    }
  }
  return std::nullopt;
}

bool check_offroad(const WorldState& w, const AgentRef& agent) {
  require_present(w, agent);
  if (!w.map) return true;
  for (const Vec2& c : rect_corners(footprint(w.attributes(agent), w.state(agent)))) {
    if (!point_on_drivable(*w.map, c)) return true;
  }
  return false;
}

std::optional<int> check_wrong_way(const WorldState& w, const AgentRef& agent,
                                   double lane_radius) {
  require_present(w, agent);
  if (!w.map) return std::nullopt;
  const DynamicState& s = w.state(agent);
  const auto hit = nearest_lane_direction(*w.map, s.pose.position(), lane_radius);
  if (!hit) return std::nullopt;
  if (std::abs(angle_diff(s.pose.psi(), hit->tangent)) > std::numbers::pi / 2.0) return hit->lane_id;
  return std::nullopt;
}

std::optional<std::string> check_traffic_light(const WorldState& w, const AgentRef& agent,
                                               const DynamicState& prev) {
  require_present(w, agent);
  const Vec2 from = prev.pose.position();
  const Vec2 to = w.state(agent).pose.position();
  if (from == to) return std::nullopt;
  for (const auto& c : w.controls) {
    if (c.kind != ControlKind::TrafficLight || c.state != LightState::Red) continue;
    if (segment_intersects_rect(from, to, c.rect)) return c.id;
  }
  return std::nullopt;
}

InfractionReport evaluate_infractions(const WorldState& w, const AgentRef& agent,
                                      const DynamicState& prev, double lane_radius) {
  InfractionReport r;
  r.collided_with = check_collision(w, agent);
  r.collision = r.collided_with.has_value();
  r.offroad = check_offroad(w, agent);
  r.wrong_way_lane = check_wrong_way(w, agent, lane_radius);
  r.wrong_way = r.wrong_way_lane.has_value();
  r.violated_control = check_traffic_light(w, agent, prev);
  r.traffic_light = r.violated_control.has_value();
  return r;
}

}  // namespace drivesim
