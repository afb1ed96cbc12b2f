#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <type_traits>
#include <vector>

#include "drivesim/controls.hpp"
#include "drivesim/errors.hpp"
#include "drivesim/kinematics.hpp"
#include "drivesim/map.hpp"

namespace drivesim {

inline const std::string kVehicle = "vehicle";
inline const std::string kPedestrian = "pedestrian";
inline const std::string kBicycle = "bicycle";
// Parked obstacles: the mock driver never moves them.
inline const std::string kStatic = "static";

// All agents of one type. Rows are stable for the lifetime of a world; agents that leave
// are marked absent rather than erased.
struct AgentBatch {
  KinematicModel model = KinematicModel::bicycle();
  std::vector<AgentAttributes> attrs;
  std::vector<DynamicState> states;
  std::vector<bool> present;

  std::size_t size() const { return states.size(); }
  std::size_t count_present() const;
  // Validates the attributes before appending.
  void add(const AgentAttributes& a, const DynamicState& s, bool is_present = true);

  friend bool operator==(const AgentBatch&, const AgentBatch&) = default;
};

using AgentMap = std::map<std::string, AgentBatch>;

struct AgentRef {
  std::string type;
  std::size_t index = 0;

  friend bool operator==(const AgentRef&, const AgentRef&) = default;
  friend auto operator<=>(const AgentRef&, const AgentRef&) = default;
};

struct WorldState {
  std::shared_ptr<const MapBundle> map;
  AgentMap agents;
  std::vector<TrafficControl> controls;
  std::int64_t step_index = 0;
  double dt = kDefaultDt;
  // When set, vehicle row 0 is the ego agent.
  bool has_ego = false;

  const AgentBatch* batch(const std::string& type) const;
  const DynamicState& state(const AgentRef& ref) const;
  const AgentAttributes& attributes(const AgentRef& ref) const;
  bool is_present(const AgentRef& ref) const;
  bool is_ego(const AgentRef& ref) const { return has_ego && ref.type == kVehicle && ref.index == 0; }

  // Value equality; maps compare by content.
  friend bool operator==(const WorldState& a, const WorldState& b);
};

using ActionMap = std::map<std::string, std::vector<Action>>;

// Zero actions of the right dimension for every row.
ActionMap zero_actions(const WorldState& w);

// Advances every present agent through its type's kinematic model and ticks the control
// programs. Presence is never changed here.
WorldState world_step(const WorldState& w, const ActionMap& actions);

// Lifts a per-batch function to every agent type. Failures are re-thrown as
// AgentTypeError naming the type.
template <class F>
auto lift(F f) {
  return [f = std::move(f)](const AgentMap& agents) {
    using R = std::decay_t<std::invoke_result_t<const F&, const AgentBatch&>>;
    std::map<std::string, R> out;
    for (const auto& [type, batch] : agents) {
      try {
        out.emplace(type, f(batch));
      } catch (const AgentTypeError&) {
        throw;
      } catch (const std::exception& e) {
        throw AgentTypeError(type, e.what());
      }
    }
    return out;
  };
}

// Applies a lifted batch transform to a world's agents.
template <class F>
WorldState map_agents(const WorldState& w, F f) {
  WorldState out = w;
  out.agents = lift(std::move(f))(w.agents);
  return out;
}

// Present rows in deterministic order: types alphabetically, rows ascending.
std::vector<AgentRef> present_agents(const WorldState& w);

}  // namespace drivesim
