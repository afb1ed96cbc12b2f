#include "drivesim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "drivesim/errors.hpp"
#include "json_util.hpp"

namespace drivesim {

namespace {

using detail::json;

double number(const json& j, const std::string& what) {
  return detail::finite_number<MalformedScenario>(j, what);
}

AgentAttributes attributes_from(const json& j, const std::string& what, AgentAttributes base) {
  if (j.contains("length")) base.length = number(j.at("length"), what + ".length");
  if (j.contains("width")) base.width = number(j.at("width"), what + ".width");
  if (j.contains("rear_axis_offset")) {
    base.rear_axis_offset = number(j.at("rear_axis_offset"), what + ".rear_axis_offset");
  }
  try {
    validate_attributes(base);
  } catch (const ConfigError& e) {
    throw MalformedScenario(what + ": " + e.what());
  }
  return base;
}

DynamicState state_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 4) throw MalformedScenario(what + " must be [x, y, psi, v]");
  return {number(j[0], what), number(j[1], what), number(j[2], what), number(j[3], what)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedScenario("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::shared_ptr<const MapBundle> MapCache::get(const std::string& name_or_path,
                                               const std::filesystem::path& relative_to) {
  std::filesystem::path path;
  if (name_or_path.size() > 5 && name_or_path.ends_with(".json")) {
    path = relative_to / name_or_path;
  } else {
    path = maps_dir_ / (name_or_path + ".json");
  }
  path = std::filesystem::weakly_canonical(path);
  if (auto it = cache_.find(path); it != cache_.end()) return it->second;
  auto map = std::make_shared<const MapBundle>(load_map(path));
  cache_.emplace(path, map);
  return map;
}

Scenario parse_scenario(std::string_view json_text, MapCache& maps,
                        const std::filesystem::path& base_dir, std::string name) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw MalformedScenario(e.what());
  }
  if (!doc.is_object()) throw MalformedScenario("top level must be an object");

  Scenario sc;
  sc.name = doc.contains("name") ? doc.at("name").get<std::string>() : std::move(name);
  const auto& map_name = detail::require<MalformedScenario>(doc, "map", "scenario");
  if (!map_name.is_string()) throw MalformedScenario("map must be a string");
  sc.map = maps.get(map_name.get<std::string>(), base_dir);

  if (doc.contains("ego")) sc.ego_attrs = attributes_from(doc.at("ego"), "ego", sc.ego_attrs);
  if (doc.contains("npc")) sc.npc_attrs = attributes_from(doc.at("npc"), "npc", sc.npc_attrs);

  const auto& spawns = detail::require<MalformedScenario>(doc, "ego_spawns", "scenario");
  if (!spawns.is_array() || spawns.empty()) throw MalformedScenario("need at least one ego spawn");
  for (std::size_t i = 0; i < spawns.size(); ++i) {
    sc.ego_spawns.push_back(state_from(spawns[i], "ego_spawns[" + std::to_string(i) + "]"));
  }

  const auto& wps = detail::require<MalformedScenario>(doc, "waypoints", "scenario");
  if (!wps.is_array() || wps.empty()) throw MalformedScenario("need at least one waypoint");
  for (std::size_t i = 0; i < wps.size(); ++i) {
    const std::string what = "waypoints[" + std::to_string(i) + "]";
    const Vec2 p = detail::point2<MalformedScenario>(wps[i], what);
    if (!point_on_drivable(*sc.map, p)) throw MalformedScenario(what + " is off the drivable mesh");
    sc.waypoints.push_back(p);
  }

  if (doc.contains("predefined_agents")) {
    const auto& agents = doc.at("predefined_agents");
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const std::string what = "predefined_agents[" + std::to_string(i) + "]";
      npc::AgentSpec a;
      if (agents[i].contains("type")) a.type = agents[i].at("type").get<std::string>();
      a.attrs = attributes_from(agents[i], what, sc.npc_attrs);
      a.state = state_from(detail::require<MalformedScenario>(agents[i], "state", what), what + ".state");
      sc.predefined_agents.push_back(a);
    }
  }

  if (doc.contains("npc_count")) {
    const auto& n = doc.at("npc_count");
    if (!n.is_number_integer() || n.get<long long>() < 0) {
      throw MalformedScenario("npc_count must be a non-negative integer");
    }
    sc.npc_count = n.get<std::size_t>();
  }
  if (doc.contains("max_steps")) {
    const auto& n = doc.at("max_steps");
    if (!n.is_number_integer() || n.get<long long>() < 1) throw MalformedScenario("max_steps must be >= 1");
    sc.max_steps = n.get<int>();
  }
  if (doc.contains("dt")) {
    sc.dt = number(doc.at("dt"), "dt");
    if (!(sc.dt > 0.0)) throw MalformedScenario("dt must be positive");
  }
  if (doc.contains("seed")) sc.default_seed = doc.at("seed").get<std::uint64_t>();

  if (doc.contains("reward")) {
    const auto& r = doc.at("reward");
    auto read = [&r](const char* key, double& field) {
      if (r.contains(key)) field = number(r.at(key), std::string("reward.") + key);
    };
    read("alpha1", sc.reward.alpha1);
    read("alpha2", sc.reward.alpha2);
    read("beta1", sc.reward.beta1);
    read("move_eps", sc.reward.move_eps);
    read("waypoint_radius", sc.reward.waypoint_radius);
    read("offroad_penalty", sc.reward.offroad_penalty);
    read("wrong_way_penalty", sc.reward.wrong_way_penalty);
    read("traffic_light_penalty", sc.reward.traffic_light_penalty);
    read("collision_penalty", sc.reward.collision_penalty);
  }
  if (doc.contains("spawn_jitter")) {
    const auto& j = doc.at("spawn_jitter");
    if (j.contains("position_sigma")) sc.jitter.position_sigma = number(j.at("position_sigma"), "spawn_jitter");
    if (j.contains("heading_sigma")) sc.jitter.heading_sigma = number(j.at("heading_sigma"), "spawn_jitter");
  }

  // Map controls first; scenario declarations replace same-id entries.
  sc.controls = sc.map->controls;
  if (doc.contains("controls")) {
    const auto& controls = doc.at("controls");
    for (std::size_t i = 0; i < controls.size(); ++i) {
      const std::string what = "controls[" + std::to_string(i) + "]";
      bool has_rect = false;
      TrafficControl c = detail::control_from<MalformedScenario>(controls[i], what, &has_rect);
      if (!has_rect) {
        const StopLine* s = sc.map->find_stop_line(c.id);
        if (s == nullptr) throw MalformedScenario(what + " has no rect and no matching stop line");
        c.rect = s->rect;
      }
      try {
        validate_control(c);
      } catch (const ConfigError& e) {
        throw MalformedScenario(e.what());
      }
      auto it = std::find_if(sc.controls.begin(), sc.controls.end(),
                             [&c](const TrafficControl& x) { return x.id == c.id; });
      if (it != sc.controls.end()) {
        *it = std::move(c);
      } else {
        sc.controls.push_back(std::move(c));
      }
    }
  }
  for (const auto& stop : sc.map->stop_lines) {
    const bool declared = std::any_of(sc.controls.begin(), sc.controls.end(),
                                      [&stop](const TrafficControl& c) { return c.id == stop.control; });
    if (!declared) throw MalformedScenario("stop line references undeclared control " + stop.control);
  }
  sc.controls = advance_controls(std::move(sc.controls), 0);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path, MapCache& maps) {
  return parse_scenario(read_file(path), maps, path.parent_path(), path.stem().string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::filesystem::path dir = std::filesystem::absolute(path).parent_path();
  for (int up = 0; up < 4 && !dir.empty(); ++up, dir = dir.parent_path()) {
    if (std::filesystem::is_directory(dir / "maps")) {
      MapCache maps(dir / "maps");
      return load_scenario(path, maps);
    }
    if (dir == dir.parent_path()) break;
  }
  MapCache maps(path.parent_path());
  return load_scenario(path, maps);
}

std::map<std::string, Scenario> load_scenario_dir(const std::filesystem::path& dir, MapCache& maps) {
  std::map<std::string, Scenario> out;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    Scenario sc = load_scenario(f, maps);
    const std::string key =
        std::filesystem::relative(f, dir).replace_extension().generic_string();
    if (!out.emplace(key, std::move(sc)).second) {
      throw MalformedScenario("duplicate scenario name " + key);
    }
  }
  return out;
}

}  // namespace drivesim
