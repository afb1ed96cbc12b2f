#include "drivesim/env.hpp"

#include <cmath>

#include "drivesim/rng.hpp"

namespace drivesim {

namespace {

const AgentRef kEgo{kVehicle, 0};

KinematicModel model_for(const std::string& type) {
  if (type == kVehicle) {
    return KinematicModel::bicycle({kSteeringBound, -kAccelerationBound, kAccelerationBound});
  }
  return KinematicModel::unconstrained();
}

bool has_npcs(const WorldState& w) {
  for (const auto& [type, batch] : w.agents) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch.present[i] && !w.is_ego({type, i})) return true;
    }
  }
  return false;
}

}  // namespace

EgoAction clip_action(EgoAction a, bool* clipped) {
  const EgoAction in = a;
  if (!std::isfinite(a.steering)) a.steering = 0.0;
  if (!std::isfinite(a.acceleration)) a.acceleration = 0.0;
  a.steering = std::clamp(a.steering, -kSteeringBound, kSteeringBound);
  a.acceleration = std::clamp(a.acceleration, -kAccelerationBound, kAccelerationBound);
  if (clipped != nullptr) *clipped = !(a == in);
  return a;
}

RewardBreakdown compute_reward(const DynamicState& prev, const DynamicState& next,
                               std::span<const Vec2> waypoints, const RewardConstants& consts) {
  RewardBreakdown r;
  r.displacement = distance(prev.pose.position(), next.pose.position());
  r.moved = r.displacement >= consts.move_eps;
  r.waypoint_hit =
      !waypoints.empty() && distance(next.pose.position(), waypoints.front()) <= consts.waypoint_radius;
  r.smoothness = 1.0 - std::cos(angle_diff(next.pose.psi(), prev.pose.psi()));
  r.reward = consts.alpha1 * (r.moved ? 1.0 : 0.0) + consts.alpha2 * (r.waypoint_hit ? 1.0 : 0.0) -
             consts.beta1 * r.smoothness;
  return r;
}

std::string_view to_string(EndCause c) {
  switch (c) {
    case EndCause::Collision: return "collision";
    case EndCause::Offroad: return "offroad";
    case EndCause::TrafficLight: return "traffic_light";
    case EndCause::Goal: return "goal";
    case EndCause::Truncation: return "truncation";
  }
  return "unknown";
}

std::vector<std::uint8_t> Observation::to_bytes() const {
  std::vector<std::uint8_t> out;
  out.reserve(kObsBytes);
  for (const auto& f : frames) {
    for (int c = 0; c < kObsChannels; ++c) {
      for (std::size_t p = 0; p < static_cast<std::size_t>(f.width) * f.height; ++p) {
        out.push_back(f.pixels[p * 3 + c]);
      }
    }
  }
  return out;
}

MetricsRow episode_metrics(const EpisodeHistory& history) {
  if (!history.done || history.steps.empty() || !history.steps.back().ended_by) {
    throw IncompleteEpisode();
  }
  MetricsRow row;
  for (const auto& s : history.steps) {
    row.episode_return += s.reward;
    row.waypoints += s.waypoint_hit ? 1 : 0;
  }
  row.horizon = static_cast<int>(history.steps.size());
  row.ended_by = *history.steps.back().ended_by;
  return row;
}

Env::Env(Scenario scenario, std::shared_ptr<npc::BehaviorPolicy> policy, EnvConfig cfg)
    : scenario_(std::move(scenario)), policy_(std::move(policy)), cfg_(cfg) {
  if (!scenario_.map) throw ConfigError("scenario without a map");
  if (scenario_.ego_spawns.empty()) throw ConfigError("scenario needs an ego spawn");
  if (scenario_.waypoints.empty()) throw ConfigError("scenario needs a waypoint");
  if (!policy_) policy_ = std::make_shared<npc::LocalMockPolicy>();
  if (!cfg_.render_observations) cfg_.render.backend = RenderBackend::Dummy;
  cfg_.render.waypoint_radius = scenario_.reward.waypoint_radius;
}

ResetResult Env::reset(std::optional<std::uint64_t> seed) {
  seed_ = seed.value_or(scenario_.default_seed);
  Rng rng(mix_seed(seed_, 0));

  // Placement check world: ego candidate plus predefined agents.
  WorldState probe;
  probe.map = scenario_.map;
  probe.has_ego = true;
  probe.agents[kVehicle].model = model_for(kVehicle);
  probe.agents[kVehicle].add(scenario_.ego_attrs, scenario_.ego_spawns.front());
  for (const auto& a : scenario_.predefined_agents) {
    auto& b = probe.agents[a.type];
    if (b.size() == 0) b.model = model_for(a.type);
    b.add(a.attrs, a.state);
  }
  auto acceptable = [&](const DynamicState& s) {
    probe.agents[kVehicle].states[0] = s;
    return !check_offroad(probe, kEgo) && !check_collision(probe, kEgo);
  };

  std::optional<DynamicState> ego;
  std::size_t spawn_index = 0;
  for (int attempt = 0; attempt < cfg_.max_spawn_attempts && !ego; ++attempt) {
    spawn_index = rng.index(scenario_.ego_spawns.size());
    const DynamicState& base = scenario_.ego_spawns[spawn_index];
    const DynamicState candidate(base.pose.x + rng.normal(0.0, scenario_.jitter.position_sigma),
                                 base.pose.y + rng.normal(0.0, scenario_.jitter.position_sigma),
                                 base.pose.psi() + rng.normal(0.0, scenario_.jitter.heading_sigma),
                                 base.speed);
    if (acceptable(candidate)) ego = candidate;
  }
  for (std::size_t i = 0; i < scenario_.ego_spawns.size() && !ego; ++i) {
    if (acceptable(scenario_.ego_spawns[i])) {
      ego = scenario_.ego_spawns[i];
      spawn_index = i;
    }
  }
  if (!ego) throw PlacementExhausted(0);

  npc::InitializeRequest req;
  req.map = scenario_.map;
  req.predefined.push_back({kVehicle, scenario_.ego_attrs, *ego});
  req.predefined.insert(req.predefined.end(), scenario_.predefined_agents.begin(),
                        scenario_.predefined_agents.end());
  req.npc_count = scenario_.npc_count;
  req.npc_attrs = scenario_.npc_attrs;
  req.controls = advance_controls(scenario_.controls, 0);
  req.seed = mix_seed(seed_, 1);
  const npc::InitializeResponse init = policy_->initialize(req);
  if (init.agents.empty() || !(init.agents.front() == req.predefined.front())) {
    throw ConfigError("behavior policy must return the ego vehicle first");
  }

  world_ = WorldState{};
  world_.map = scenario_.map;
  world_.dt = scenario_.dt;
  world_.has_ego = true;
  world_.controls = req.controls;
  for (const auto& a : init.agents) {
    auto& b = world_.agents[a.type];
    if (b.size() == 0) b.model = model_for(a.type);
    b.add(a.attrs, a.state);
  }

  waypoints_.assign(scenario_.waypoints.begin(), scenario_.waypoints.end());
  reached_ = 0;
  history_ = EpisodeHistory{seed_, {}, false};
  reset_ = true;

  const BirdviewFrame first = render_current();
  for (auto& f : obs_.frames) f = first;

  ResetResult r;
  r.obs = obs_;
  r.info = {seed_, spawn_index, present_agents(world_).size(), waypoints_.size()};
  return r;
}

std::optional<Vec2> Env::next_waypoint() const {
  if (waypoints_.empty()) return std::nullopt;
  return waypoints_.front();
}

BirdviewFrame Env::render_current() const { return render_birdview(world_, cfg_.render, next_waypoint()); }

void Env::push_frame(BirdviewFrame f) {
  for (int i = 0; i + 1 < kObsFrames; ++i) obs_.frames[i] = std::move(obs_.frames[i + 1]);
  obs_.frames[kObsFrames - 1] = std::move(f);
}

StepResult Env::step(EgoAction action) {
  if (!reset_) throw NotReset();
  if (history_.done) throw SteppedAfterDone();

  StepResult result;
  StepInfo& info = result.info;
  info.applied_action = clip_action(action, &info.action_clipped);
  const DynamicState prev = world_.state(kEgo);

  // NPCs react to the world as it stood before this step.
  std::optional<npc::DriveResponse> npc_next;
  if (has_npcs(world_)) {
    npc_next = npc::npc_slice(world_, policy_->drive(npc::build_drive_request(world_, seed_)));
  }

  ActionMap actions = zero_actions(world_);
  actions[kVehicle][0] = {info.applied_action.steering, info.applied_action.acceleration};
  WorldState next = world_step(world_, actions);
  if (npc_next) next = npc::apply_npc_states(next, *npc_next);
  world_ = std::move(next);

  const DynamicState& now = world_.state(kEgo);
  info.infractions = evaluate_infractions(world_, kEgo, prev, cfg_.lane_radius);
  const std::vector<Vec2> queue(waypoints_.begin(), waypoints_.end());
  info.reward_terms = compute_reward(prev, now, queue, scenario_.reward);
  if (info.reward_terms.waypoint_hit) {
    waypoints_.pop_front();
    ++reached_;
  }

  const RewardConstants& k = scenario_.reward;
  const InfractionReport& inf = info.infractions;
  info.penalty = (inf.offroad ? k.offroad_penalty : 0.0) + (inf.wrong_way ? k.wrong_way_penalty : 0.0) +
                 (inf.traffic_light ? k.traffic_light_penalty : 0.0) +
                 (inf.collision ? k.collision_penalty : 0.0);
  result.reward = info.reward_terms.reward + info.penalty;

  if (inf.collision) {
    info.ended_by = EndCause::Collision;
  } else if (inf.offroad) {
    info.ended_by = EndCause::Offroad;
  } else if (inf.traffic_light) {
    info.ended_by = EndCause::TrafficLight;
  } else if (waypoints_.empty()) {
    info.ended_by = EndCause::Goal;
  }
  result.terminated = info.ended_by.has_value();
  if (!result.terminated && world_.step_index >= scenario_.max_steps) {
    result.truncated = true;
    info.ended_by = EndCause::Truncation;
  }

  info.waypoints_reached = reached_;
  info.waypoints_remaining = waypoints_.size();
  info.step = world_.step_index;

  push_frame(render_current());
  result.obs = obs_;

  history_.steps.push_back({prev, now, info.applied_action, result.reward,
                            info.reward_terms.waypoint_hit, info.ended_by});
  history_.done = result.terminated || result.truncated;
  return result;
}

}  // namespace drivesim
