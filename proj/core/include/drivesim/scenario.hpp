#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drivesim/map.hpp"
#include "drivesim/npc.hpp"

namespace drivesim {

inline constexpr int kMaxEpisodeSteps = 200;

struct RewardConstants {
  double alpha1 = 1.0;   // movement bonus weight
  double alpha2 = 10.0;  // waypoint bonus weight
  double beta1 = 0.05;   // smoothness penalty weight
  double move_eps = 0.5;
  double waypoint_radius = 2.0;
  // Optional infraction terms added to the reward when the flag is set. Zero by default.
  double offroad_penalty = 0.0;
  double wrong_way_penalty = 0.0;
  double traffic_light_penalty = 0.0;
  double collision_penalty = 0.0;

  friend bool operator==(const RewardConstants&, const RewardConstants&) = default;
};

struct SpawnJitter {
  double position_sigma = 0.5;
  double heading_sigma = 0.05;
};

struct Scenario {
  std::string name;
  std::shared_ptr<const MapBundle> map;
  std::vector<DynamicState> ego_spawns;
  AgentAttributes ego_attrs;
  std::vector<Vec2> waypoints;
  std::vector<npc::AgentSpec> predefined_agents;
  std::size_t npc_count = 0;
  AgentAttributes npc_attrs;
  // Resolved controls: map defaults overridden by the scenario's own declarations.
  std::vector<TrafficControl> controls;
  int max_steps = kMaxEpisodeSteps;
  double dt = kDefaultDt;
  RewardConstants reward;
  SpawnJitter jitter;
  std::uint64_t default_seed = 0;
};

// Resolves map names to files and shares bundles between scenarios.
class MapCache {
 public:
  explicit MapCache(std::filesystem::path maps_dir) : maps_dir_(std::move(maps_dir)) {}
  std::shared_ptr<const MapBundle> get(const std::string& name_or_path,
                                       const std::filesystem::path& relative_to);

 private:
  std::filesystem::path maps_dir_;
  std::map<std::filesystem::path, std::shared_ptr<const MapBundle>> cache_;
};

// `map` names resolve to <maps_dir>/<name>.json; values ending in .json are paths
// relative to the scenario file.
Scenario parse_scenario(std::string_view json_text, MapCache& maps,
                        const std::filesystem::path& base_dir, std::string name = {});
Scenario load_scenario(const std::filesystem::path& path, MapCache& maps);
// Looks for a maps/ directory next to or above the scenario file.
Scenario load_scenario(const std::filesystem::path& path);

// Every *.json under `dir`, recursively, keyed by relative path without extension
// ("train/roundabout").
std::map<std::string, Scenario> load_scenario_dir(const std::filesystem::path& dir, MapCache& maps);

}  // namespace drivesim
