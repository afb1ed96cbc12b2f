#include "drivesim/golden.hpp"

#include "drivesim/env.hpp"

namespace drivesim {

namespace {

WorldState single_ego(std::shared_ptr<const MapBundle> map, const DynamicState& ego) {
  WorldState w;
  w.map = std::move(map);
  w.has_ego = true;
  w.controls = advance_controls(w.map->controls, 0);
  w.agents[kVehicle].model = KinematicModel::bicycle({});
  w.agents[kVehicle].add(AgentAttributes{}, ego);
  return w;
}

// Scenario frame after `steps` idle steps from reset(seed).
BirdviewFrame scenario_frame(const std::filesystem::path& data_dir, const std::string& rel,
                             std::uint64_t seed, int steps) {
  MapCache maps(data_dir / "maps");
  Env env(load_scenario(data_dir / "scenarios" / (rel + ".json"), maps));
  env.reset(seed);
  for (int i = 0; i < steps && !env.done(); ++i) env.step({0.0, 0.5});
  return env.render_current();
}

}  // namespace

std::vector<GoldenCase> golden_cases(const std::filesystem::path& data_dir) {
  auto straight = [data_dir] {
    MapCache maps(data_dir / "maps");
    return maps.get("straight_road", data_dir);
  };
  return {
      {"straight_center",
       [straight] { return render_birdview(single_ego(straight(), {100.0, 0.0, 0.0, 0.0}), {}); }},
      {"straight_waypoint",
       [straight] {
         return render_birdview(single_ego(straight(), {20.0, -2.0, 0.0, 0.0}), {}, Vec2{30.0, -2.0});
       }},
      {"empty_map_no_ego",
       [straight] {
         WorldState w;
         w.map = straight();
         return render_birdview(w, {});
       }},
      {"controlled_intersection_seed3",
       [data_dir] { return scenario_frame(data_dir, "train/controlled_intersection", 3, 0); }},
      {"roundabout_seed1_step10",
       [data_dir] { return scenario_frame(data_dir, "val/roundabout", 1, 10); }},
      {"traffic_lights_seed0",
       [data_dir] { return scenario_frame(data_dir, "val/traffic_lights", 0, 0); }},
  };
}

std::vector<std::filesystem::path> write_goldens(const std::filesystem::path& data_dir,
                                                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> out;
  for (const auto& c : golden_cases(data_dir)) {
    out.push_back(out_dir / (c.name + ".ppm"));
    write_ppm(c.render(), out.back());
  }
  return out;
}

}  // namespace drivesim
