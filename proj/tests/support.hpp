#pragma once

#include <filesystem>
#include <memory>

#include "drivesim/env.hpp"
#include "drivesim/infraction.hpp"
#include "drivesim/npc.hpp"
#include "drivesim/scenario.hpp"

namespace drivesim::test {

inline const std::filesystem::path kDataDir = DRIVESIM_TEST_DATA_DIR;
inline const std::filesystem::path kFixtureDir = DRIVESIM_FIXTURE_DIR;
inline const std::filesystem::path kGoldenDir = DRIVESIM_GOLDEN_DIR;

inline const char* const kBundledMaps[] = {"straight_road", "four_way", "three_way", "roundabout",
                                           "rural_road"};

inline std::shared_ptr<const MapBundle> bundled_map(const std::string& name) {
  return std::make_shared<const MapBundle>(load_map(kDataDir / "maps" / (name + ".json")));
}

inline Scenario fixture_scenario(const std::string& name) {
  MapCache maps(kDataDir / "maps");
  return load_scenario(kFixtureDir / (name + ".json"), maps);
}

inline Scenario bundled_scenario(const std::string& rel) {
  MapCache maps(kDataDir / "maps");
  return load_scenario(kDataDir / "scenarios" / (rel + ".json"), maps);
}

// Square drivable area [lo, hi]^2 with one lane along +x through the middle.
inline std::shared_ptr<const MapBundle> square_map(double lo = -50.0, double hi = 50.0) {
  MapBundle m;
  m.name = "square";
  m.mesh = DrivableMesh({{{lo, lo}, {hi, lo}, {hi, hi}}, {{lo, lo}, {hi, hi}, {lo, hi}}});
  m.lanes.push_back({0, {{lo, 0.0}, {hi, 0.0}}});
  return std::make_shared<const MapBundle>(std::move(m));
}

// Vehicles only, bicycle model, first row is the ego when `ego` is set.
inline WorldState vehicle_world(std::shared_ptr<const MapBundle> map,
                                const std::vector<DynamicState>& states, bool ego = true) {
  WorldState w;
  w.map = std::move(map);
  w.has_ego = ego;
  w.agents[kVehicle].model = KinematicModel::bicycle({});
  for (const auto& s : states) w.agents[kVehicle].add(AgentAttributes{}, s);
  return w;
}

// World holding exactly the given agents, no ego; batches use the unconstrained model.
inline WorldState world_from_agents(std::shared_ptr<const MapBundle> map,
                                    const std::vector<npc::AgentSpec>& agents) {
  WorldState w;
  w.map = std::move(map);
  for (const auto& a : agents) {
    auto& batch = w.agents[a.type];
    batch.model = KinematicModel::unconstrained();
    batch.add(a.attrs, a.state);
  }
  return w;
}

struct SanityCount {
  std::size_t collisions = 0;
  std::size_t offroad = 0;
  std::size_t wrong_way = 0;
};

// Runs the infraction predicates over every agent of a placement.
inline SanityCount placement_sanity(const WorldState& w) {
  SanityCount n;
  for (const auto& ref : present_agents(w)) {
    n.collisions += check_collision(w, ref).has_value() ? 1 : 0;
    n.offroad += check_offroad(w, ref) ? 1 : 0;
    n.wrong_way += check_wrong_way(w, ref).has_value() ? 1 : 0;
  }
  return n;
}

inline std::size_t sample_count_for(const std::string& map_name) {
  if (map_name == "straight_road" || map_name == "rural_road") return 10;
  return 6;
}

}  // namespace drivesim::test
