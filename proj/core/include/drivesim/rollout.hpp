#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drivesim/env.hpp"

namespace drivesim {

enum class PolicyKind { Idle, Random, Scripted };

struct RolloutPolicy {
  PolicyKind kind = PolicyKind::Idle;
  // Scripted: action t is used at step t; past the end the ego idles.
  std::vector<EgoAction> script;
};

// One action per line, "steering acceleration"; blank lines and # comments skipped.
std::vector<EgoAction> read_action_script(std::istream& in);
std::vector<EgoAction> read_action_script(const std::filesystem::path& path);

// "idle", "random", or a path to a script file.
RolloutPolicy policy_from_arg(const std::string& arg);

struct RolloutConfig {
  int episodes = 1;
  std::uint64_t seed = 0;  // episode k runs with seed + k
  std::optional<std::filesystem::path> frames_dir;
  EnvConfig env;
};

struct EpisodeRow {
  int episode = 0;
  std::uint64_t seed = 0;
  MetricsRow metrics;
};

std::vector<EpisodeRow> run_rollout(const Scenario& scenario, const RolloutPolicy& policy,
                                    const RolloutConfig& cfg);

inline constexpr const char* kMetricsCsvHeader = "episode,seed,return,horizon,waypoints,ended_by";
void write_metrics_csv(const std::vector<EpisodeRow>& rows, std::ostream& out);
std::string format_metrics_csv(const std::vector<EpisodeRow>& rows);

struct AggregateMetrics {
  double mean_return = 0.0;
  double mean_horizon = 0.0;
  double mean_waypoints = 0.0;
  // Fraction of episodes per end cause.
  std::map<std::string, double> ended_by;
};

AggregateMetrics aggregate(const std::vector<EpisodeRow>& rows);
std::string format_aggregate(const AggregateMetrics& m);

}  // namespace drivesim
