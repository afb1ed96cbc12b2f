#include "drivesim/rollout.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "drivesim/rng.hpp"

namespace drivesim {

std::vector<EgoAction> read_action_script(std::istream& in) {
  std::vector<EgoAction> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    EgoAction a;
    if (!(ss >> a.steering)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ConfigError("action script line " + std::to_string(lineno) + ": expected two numbers");
    }
    std::string rest;
    if (!(ss >> a.acceleration) || (ss >> rest)) {
      throw ConfigError("action script line " + std::to_string(lineno) + ": expected two numbers");
    }
    out.push_back(a);
  }
  return out;
}

std::vector<EgoAction> read_action_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open action script " + path.string());
  return read_action_script(in);
}

RolloutPolicy policy_from_arg(const std::string& arg) {
  if (arg == "idle") return {PolicyKind::Idle, {}};
  if (arg == "random") return {PolicyKind::Random, {}};
  return {PolicyKind::Scripted, read_action_script(std::filesystem::path(arg))};
}

std::vector<EpisodeRow> run_rollout(const Scenario& scenario, const RolloutPolicy& policy,
                                    const RolloutConfig& cfg) {
  if (cfg.episodes < 0) throw ConfigError("episodes must be non-negative");
  Env env(scenario, nullptr, cfg.env);
  RenderConfig frame_cfg = cfg.env.render;
  frame_cfg.backend = RenderBackend::Cpu;

  std::vector<EpisodeRow> rows;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(ep);
    env.reset(seed);
    Rng rng(mix_seed(seed, 7));

    std::filesystem::path ep_dir;
    auto dump = [&](std::int64_t t) {
      if (!cfg.frames_dir) return;
      std::optional<Vec2> wp;
      if (!env.waypoint_queue().empty()) wp = env.waypoint_queue().front();
      char name[32];
      std::snprintf(name, sizeof name, "frame_%06lld.ppm", static_cast<long long>(t));
      write_ppm(render_birdview(env.world(), frame_cfg, wp), ep_dir / name);
    };
    if (cfg.frames_dir) {
      char name[32];
      std::snprintf(name, sizeof name, "episode_%04d", ep);
      ep_dir = *cfg.frames_dir / name;
      std::filesystem::create_directories(ep_dir);
    }
    dump(0);

    for (std::size_t t = 0; !env.done(); ++t) {
      EgoAction a;
      switch (policy.kind) {
        case PolicyKind::Idle: break;
        case PolicyKind::Random:
          a.steering = rng.uniform(-kSteeringBound, kSteeringBound);
          a.acceleration = rng.uniform(-kAccelerationBound, kAccelerationBound);
          break;
        case PolicyKind::Scripted:
          if (t < policy.script.size()) a = policy.script[t];
          break;
      }
      env.step(a);
      dump(env.world().step_index);
    }
    rows.push_back({ep, seed, episode_metrics(env.history())});
  }
  return rows;
}

void write_metrics_csv(const std::vector<EpisodeRow>& rows, std::ostream& out) {
  out << kMetricsCsvHeader << '\n';
  char ret[40];
  for (const auto& r : rows) {
    std::snprintf(ret, sizeof ret, "%.17g", r.metrics.episode_return);
    out << r.episode << ',' << r.seed << ',' << ret << ',' << r.metrics.horizon << ','
        << r.metrics.waypoints << ',' << to_string(r.metrics.ended_by) << '\n';
  }
}

std::string format_metrics_csv(const std::vector<EpisodeRow>& rows) {
  std::ostringstream ss;
  write_metrics_csv(rows, ss);
  return ss.str();
}

AggregateMetrics aggregate(const std::vector<EpisodeRow>& rows) {
  AggregateMetrics m;
  if (rows.empty()) return m;
  for (const auto& r : rows) {
    m.mean_return += r.metrics.episode_return;
    m.mean_horizon += r.metrics.horizon;
    m.mean_waypoints += r.metrics.waypoints;
    m.ended_by[std::string(to_string(r.metrics.ended_by))] += 1.0;
  }
  const double n = static_cast<double>(rows.size());
  m.mean_return /= n;
  m.mean_horizon /= n;
  m.mean_waypoints /= n;
  for (auto& [k, v] : m.ended_by) v /= n;
  return m;
}

std::string format_aggregate(const AggregateMetrics& m) {
  std::ostringstream ss;
  ss << "mean return " << m.mean_return << "\nmean horizon " << m.mean_horizon
     << "\nmean waypoints " << m.mean_waypoints << '\n';
  for (const auto& [k, v] : m.ended_by) ss << k << ' ' << v << '\n';
  return ss.str();
}

}  // namespace drivesim
