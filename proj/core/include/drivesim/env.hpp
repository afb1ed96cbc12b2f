#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "drivesim/infraction.hpp"
#include "drivesim/npc.hpp"
#include "drivesim/renderer.hpp"
#include "drivesim/scenario.hpp"

namespace drivesim {

inline constexpr double kSteeringBound = 0.3;
inline constexpr double kAccelerationBound = 1.0;
inline constexpr int kObsFrames = 3;
inline constexpr int kObsChannels = 3;
inline constexpr int kObsSize = 64;
inline constexpr std::size_t kObsBytes =
    static_cast<std::size_t>(kObsFrames) * kObsChannels * kObsSize * kObsSize;

struct EgoAction {
  double steering = 0.0;
  double acceleration = 0.0;

  friend bool operator==(const EgoAction&, const EgoAction&) = default;
};

// Clips into [-0.3, 0.3] x [-1, 1]; non-finite components become 0.
EgoAction clip_action(EgoAction a, bool* clipped = nullptr);

struct RewardBreakdown {
  double reward = 0.0;
  double displacement = 0.0;
  bool moved = false;
  bool waypoint_hit = false;
  double smoothness = 0.0;  // 1 - cos(heading change)

  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

// Reward for the transition prev -> next with `waypoints` as the remaining queue
// (front = current target). Does not pop; waypoint_hit tells the caller to.
RewardBreakdown compute_reward(const DynamicState& prev, const DynamicState& next,
                               std::span<const Vec2> waypoints, const RewardConstants& consts);

enum class EndCause { Collision, Offroad, TrafficLight, Goal, Truncation };
std::string_view to_string(EndCause c);

// Observation stack, oldest frame first.
struct Observation {
  std::array<BirdviewFrame, kObsFrames> frames;

  // frame x channel x row x column bytes.
  std::vector<std::uint8_t> to_bytes() const;
  static constexpr std::array<int, 4> shape() { return {kObsFrames, kObsChannels, kObsSize, kObsSize}; }
  friend bool operator==(const Observation&, const Observation&) = default;
};

struct StepInfo {
  InfractionReport infractions;
  RewardBreakdown reward_terms;
  double penalty = 0.0;
  EgoAction applied_action;
  bool action_clipped = false;
  std::size_t waypoints_reached = 0;
  std::size_t waypoints_remaining = 0;
  std::int64_t step = 0;
  std::optional<EndCause> ended_by;
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  StepInfo info;
};

struct ResetInfo {
  std::uint64_t seed = 0;
  std::size_t spawn_index = 0;
  std::size_t agent_count = 0;
  std::size_t waypoints_remaining = 0;
};

struct ResetResult {
  Observation obs;
  ResetInfo info;
};

struct StepRecord {
  DynamicState ego_before;
  DynamicState ego_after;
  EgoAction action;
  double reward = 0.0;
  bool waypoint_hit = false;
  std::optional<EndCause> ended_by;
};

struct EpisodeHistory {
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  bool done = false;
};

struct MetricsRow {
  double episode_return = 0.0;
  int horizon = 0;
  int waypoints = 0;
  EndCause ended_by = EndCause::Truncation;
};

MetricsRow episode_metrics(const EpisodeHistory& history);

struct EnvConfig {
  RenderConfig render;
  // false swaps in the dummy backend (all-zero frames).
  bool render_observations = true;
  double lane_radius = kDefaultLaneRadius;
  int max_spawn_attempts = 100;
};

// Single-ego reinforcement-learning task over one scenario.
class Env {
 public:
  explicit Env(Scenario scenario, std::shared_ptr<npc::BehaviorPolicy> policy = nullptr,
               EnvConfig cfg = {});

  ResetResult reset(std::optional<std::uint64_t> seed = std::nullopt);
  StepResult step(EgoAction action);

  const WorldState& world() const { return world_; }
  const Scenario& scenario() const { return scenario_; }
  const EnvConfig& config() const { return cfg_; }
  const EpisodeHistory& history() const { return history_; }
  const std::deque<Vec2>& waypoint_queue() const { return waypoints_; }
  bool is_reset() const { return reset_; }
  bool done() const { return history_.done; }
  // Current frame as the observation's newest slot would show it.
  BirdviewFrame render_current() const;

 private:
  std::optional<Vec2> next_waypoint() const;
  void push_frame(BirdviewFrame f);

  Scenario scenario_;
  std::shared_ptr<npc::BehaviorPolicy> policy_;
  EnvConfig cfg_;
  WorldState world_;
  std::deque<Vec2> waypoints_;
  Observation obs_;
  EpisodeHistory history_;
  std::uint64_t seed_ = 0;
  std::size_t reached_ = 0;
  bool reset_ = false;
};

}  // namespace drivesim
