#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "drivesim/errors.hpp"
#include "drivesim/wrappers.hpp"
#include "support.hpp"

using namespace drivesim;
using drivesim::test::square_map;
using drivesim::test::vehicle_world;

namespace {

TrafficControl light(std::vector<ProgramPhase> program) {
  TrafficControl c;
  c.id = "tl";
  c.rect = {Pose2(0, 0, 0), 1, 4};
  c.kind = ControlKind::TrafficLight;
  c.program = std::move(program);
  return c;
}

const std::vector<ProgramPhase> kProgram = {
    {LightState::Green, 50}, {LightState::Yellow, 10}, {LightState::Red, 40}};

WorldState mixed_world() {
  WorldState w = vehicle_world(square_map(), {{0, 0, 0, 1}, {10, 0, 0.5, 2}, {20, 0, 1, 3}});
  auto& ped = w.agents[kPedestrian];
  ped.model = KinematicModel::unconstrained();
  ped.add({0.5, 0.5, 0.2}, {5, 5, 0, 0});
  ped.add({0.5, 0.5, 0.2}, {6, 5, 0, 0}, false);
  return w;
}

}  // namespace

TEST(Controls, ProgramCycles) {
  EXPECT_EQ(program_state(kProgram, 0), LightState::Green);
  EXPECT_EQ(program_state(kProgram, 49), LightState::Green);
  EXPECT_EQ(program_state(kProgram, 50), LightState::Yellow);
  EXPECT_EQ(program_state(kProgram, 55), LightState::Yellow);
  EXPECT_EQ(program_state(kProgram, 60), LightState::Red);
  EXPECT_EQ(program_state(kProgram, 99), LightState::Red);
  EXPECT_EQ(program_state(kProgram, 100), LightState::Green);
  EXPECT_EQ(program_state(kProgram, 155), LightState::Yellow);
}

TEST(Controls, AdvanceLeavesSignsNotApplicable) {
  TrafficControl sign;
  sign.id = "stop";
  sign.rect = {Pose2(0, 0, 0), 1, 1};
  sign.kind = ControlKind::StopSign;
  for (std::int64_t t : {0, 7, 1000}) {
    const auto out = advance_controls({sign, light(kProgram)}, t);
    EXPECT_EQ(out[0].state, LightState::NotApplicable);
    EXPECT_EQ(out[1].state, program_state(kProgram, t));
  }
}

TEST(Controls, Validation) {
  EXPECT_NO_THROW(validate_control(light(kProgram)));
  EXPECT_THROW(validate_control(light({})), ConfigError);
  EXPECT_THROW(validate_control(light({{LightState::Red, 0}})), ConfigError);
  TrafficControl sign = light(kProgram);
  sign.kind = ControlKind::YieldSign;
  EXPECT_THROW(validate_control(sign), ConfigError);
}

TEST(WorldStep, NoPresentAgentsOnlyClockAndControls) {
  WorldState w = vehicle_world(square_map(), {{1, 2, 0, 3}}, false);
  w.agents[kVehicle].present[0] = false;
  w.controls = advance_controls({light(kProgram)}, 0);
  w.step_index = 49;
  const WorldState next = world_step(w, {});
  EXPECT_EQ(next.step_index, 50);
  EXPECT_EQ(next.controls[0].state, LightState::Yellow);
  EXPECT_EQ(next.agents, w.agents);
}

TEST(WorldStep, TeleportingReachesTargets) {
  WorldState w = vehicle_world(square_map(), {{0, 0, 0, 0}, {5, 5, 1, 1}}, false);
  w.agents[kVehicle].model = KinematicModel::teleporting();
  const WorldState next = world_step(w, {{kVehicle, {{1, 2, 0.3, 4}, {-1, -2, -0.3, 0}}}});
  EXPECT_EQ(next.agents.at(kVehicle).states[0], (DynamicState{1, 2, 0.3, 4}));
  EXPECT_EQ(next.agents.at(kVehicle).states[1], (DynamicState{-1, -2, -0.3, 0}));
}

TEST(WorldStep, MissingActionThrows) {
  const WorldState w = vehicle_world(square_map(), {{0, 0, 0, 0}, {5, 5, 1, 1}});
  EXPECT_THROW(world_step(w, {}), MissingActions);
  EXPECT_THROW(world_step(w, {{kVehicle, {{0, 0}}}}), MissingActions);
  try {
    world_step(w, {{kVehicle, {{0, 0}, {}}}});
    FAIL();
  } catch (const MissingActions& e) {
    EXPECT_EQ(e.agent_type, kVehicle);
    EXPECT_EQ(e.index, 1u);
  }
  EXPECT_THROW(world_step(w, {{kVehicle, {{0, 0}, {0, 0, 0}}}}), DimensionMismatch);
}

TEST(WorldStep, AbsentRowsNeedNoAction) {
  WorldState w = mixed_world();
  ActionMap a = zero_actions(w);
  a[kPedestrian].resize(1);
  EXPECT_NO_THROW(world_step(w, a));
}

TEST(WorldStep, InputUntouchedAndDeterministic) {
  const WorldState w = mixed_world();
  const WorldState copy = w;
  ActionMap a = zero_actions(w);
  a[kVehicle][1] = {0.2, 1.0};
  const WorldState n1 = world_step(w, a);
  const WorldState n2 = world_step(w, a);
  EXPECT_EQ(w, copy);
  EXPECT_EQ(n1, n2);
  EXPECT_EQ(n1.agents.at(kPedestrian).present, w.agents.at(kPedestrian).present);
}

TEST(WorldStep, BatchIndependence) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-1, 1);
  for (const auto& model : {KinematicModel::bicycle(), KinematicModel::unconstrained(), KinematicModel::teleporting()}) {
    WorldState w = vehicle_world(square_map(), {{0, 0, 0, 1}, {10, 3, 2, 4}}, false);
    w.agents[kVehicle].model = model;
    std::vector<Action> acts;
    for (int i = 0; i < 2; ++i) {
      Action a(model.action_dim());
      for (auto& v : a) v = d(rng);
      acts.push_back(a);
    }
    const WorldState joint = world_step(w, {{kVehicle, acts}});
    for (int i = 0; i < 2; ++i) {
      WorldState alone = vehicle_world(square_map(), {w.agents.at(kVehicle).states[i]}, false);
      alone.agents[kVehicle].model = model;
      const WorldState solo = world_step(alone, {{kVehicle, {acts[i]}}});
      EXPECT_EQ(solo.agents.at(kVehicle).states[0], joint.agents.at(kVehicle).states[i]);
    }
  }
}

TEST(Lift, IdentityLeavesWorldUnchanged) {
  const WorldState w = mixed_world();
  EXPECT_EQ(map_agents(w, [](const AgentBatch& b) { return b; }), w);
}

TEST(Lift, CountPresentPerType) {
  WorldState w = mixed_world();
  const auto counts = lift([](const AgentBatch& b) { return b.count_present(); })(w.agents);
  EXPECT_EQ(counts.at(kVehicle), 3u);
  EXPECT_EQ(counts.at(kPedestrian), 1u);
}

TEST(Lift, HomogeneousEqualsDirect) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> d(-10, 10);
  auto shift = [](const AgentBatch& b) {
    AgentBatch out = b;
    for (auto& s : out.states) s.pose.x += 1.5;
    return out;
  };
  for (int i = 0; i < 20; ++i) {
    const WorldState w = vehicle_world(square_map(), {{d(rng), d(rng), d(rng), d(rng)}, {d(rng), d(rng), d(rng), d(rng)}});
    const auto lifted = lift(shift)(w.agents);
    ASSERT_EQ(lifted.size(), 1u);
    EXPECT_EQ(lifted.at(kVehicle), shift(w.agents.at(kVehicle)));
  }
}

TEST(Lift, ErrorsNameTheType) {
  const WorldState w = mixed_world();
  try {
    lift([](const AgentBatch& b) -> int {
      if (b.model.kind() == KinematicModel::Kind::Unconstrained) throw std::runtime_error("boom");
      return 0;
    })(w.agents);
    FAIL();
  } catch (const AgentTypeError& e) {
    EXPECT_EQ(e.agent_type, kPedestrian);
  }
}

TEST(PresentAgents, CanonicalOrder) {
  const auto refs = present_agents(mixed_world());
  ASSERT_EQ(refs.size(), 4u);
  EXPECT_EQ(refs[0], (AgentRef{kPedestrian, 0}));
  EXPECT_EQ(refs[1], (AgentRef{kVehicle, 0}));
  EXPECT_EQ(refs[3], (AgentRef{kVehicle, 2}));
}

TEST(Wrappers, BoundaryRemovalKeepsAgentsInside) {
  auto sim = wrap(std::make_unique<BaseSimulator>(mixed_world()), BoundaryRemovalConfig{{{-100, -100}, {100, 100}}});
  const auto before = sim->world().agents;
  sim->step(zero_actions(sim->world()));
  for (const auto& [type, b] : sim->world().agents) EXPECT_EQ(b.present, before.at(type).present);
}

TEST(Wrappers, BoundaryRemovalDropsLeavers) {
  WorldState w = vehicle_world(square_map(), {{0, 0, 0, 0}, {9.9, 0, 0, 5}}, false);
  auto sim = wrap(std::make_unique<BaseSimulator>(w), BoundaryRemovalConfig{{{-10, -10}, {10, 10}}});
  sim->step(zero_actions(sim->world()));
  EXPECT_TRUE(sim->world().agents.at(kVehicle).present[0]);
  EXPECT_FALSE(sim->world().agents.at(kVehicle).present[1]);
  // Index stability: the row stays, only the flag changes.
  EXPECT_EQ(sim->world().agents.at(kVehicle).size(), 2u);
}

TEST(Wrappers, ReplayControllerFollowsTrajectory) {
  WorldState w = vehicle_world(square_map(), {{0, 0, 0, 0}, {5, 0, 0, 0}});
  ReplayControllerConfig cfg;
  cfg.indices = {1};
  cfg.trajectories = {{{5, 0, 0, 0}, {6, 0, 0, 1}, {7, 0, 0, 1}}};
  auto sim = wrap(std::make_unique<BaseSimulator>(w), cfg);
  ActionMap a = zero_actions(sim->world());
  a[kVehicle][1] = {0.3, 1.0};
  sim->step(a);
  EXPECT_EQ(sim->world().agents.at(kVehicle).states[1], (DynamicState{6, 0, 0, 1}));
  sim->step(a);
  EXPECT_EQ(sim->world().agents.at(kVehicle).states[1], (DynamicState{7, 0, 0, 1}));
  sim->step(a);
  EXPECT_FALSE(sim->world().agents.at(kVehicle).present[1]);
}

TEST(Wrappers, ConfigErrors) {
  const WorldState w = vehicle_world(square_map(), {{0, 0, 0, 0}});
  ReplayControllerConfig bad;
  bad.indices = {3};
  bad.trajectories = {{{0, 0, 0, 0}}};
  EXPECT_THROW(wrap(std::make_unique<BaseSimulator>(w), bad), ConfigError);
  EXPECT_THROW(wrap(std::make_unique<BaseSimulator>(w), BoundaryRemovalConfig{{{1, 1}, {0, 0}}}), ConfigError);
  EXPECT_THROW(wrap(std::make_unique<BaseSimulator>(w), NpcControllerConfig{}), ConfigError);
  EXPECT_THROW(wrap(std::make_unique<BaseSimulator>(w), FrameRecorderConfig{}), ConfigError);
}

TEST(Wrappers, InfractionMonitorCountsCollisions) {
  const WorldState w = vehicle_world(square_map(), {{0, 0, 0, 0}, {3, 0, 0, 0}});
  auto sim = wrap(std::make_unique<BaseSimulator>(w), InfractionMonitorConfig{});
  ActionMap a = zero_actions(sim->world());
  a[kVehicle][0] = {0.0, 1.0};
  for (int i = 0; i < 20; ++i) sim->step(a);
  auto* monitor = find_wrapper<InfractionMonitor>(*sim);
  ASSERT_NE(monitor, nullptr);
  EXPECT_EQ(monitor->history().size(), 20u);
  EXPECT_GT(monitor->totals().collision, 0u);
  EXPECT_TRUE(monitor->history().back().at({kVehicle, 0}).collision);
}

TEST(Wrappers, MonitorAndRecorderCommute) {
  const auto dir = std::filesystem::temp_directory_path() / "drivesim_commute";
  std::filesystem::remove_all(dir);
  const WorldState w = vehicle_world(square_map(), {{0, -3, 0, 2}, {6, 3, 3.0, 1}, {-20, 10, -1, 4}});
  FrameRecorderConfig rec_a{dir / "a", {}, "frame_"};
  FrameRecorderConfig rec_b{dir / "b", {}, "frame_"};
  auto ab = wrap(wrap(std::make_unique<BaseSimulator>(w), InfractionMonitorConfig{}), rec_a);
  auto ba = wrap(wrap(std::make_unique<BaseSimulator>(w), rec_b), InfractionMonitorConfig{});
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int t = 0; t < 30; ++t) {
    ActionMap a = zero_actions(w);
    for (auto& act : a[kVehicle]) act = {0.3 * d(rng), d(rng)};
    ab->step(a);
    ba->step(a);
    ASSERT_EQ(ab->world(), ba->world());
  }
  EXPECT_EQ(find_wrapper<InfractionMonitor>(*ab)->history(), find_wrapper<InfractionMonitor>(*ba)->history());
  EXPECT_EQ(find_wrapper<FrameRecorder>(*ab)->frames_written(), 30u);
  for (int t = 1; t <= 30; ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06d.ppm", t);
    EXPECT_EQ(read_ppm(dir / "a" / name), read_ppm(dir / "b" / name));
  }
  std::filesystem::remove_all(dir);
}

TEST(Wrappers, NpcControllerMovesOnlyNpcs) {
  const auto map = drivesim::test::bundled_map("straight_road");
  WorldState w = vehicle_world(map, {{20, -2, 0, 0}, {60, -2, 0, 8}});
  auto sim = wrap(std::make_unique<BaseSimulator>(w), NpcControllerConfig{std::make_shared<npc::LocalMockPolicy>(), 0});
  sim->step(zero_actions(sim->world()));
  EXPECT_EQ(sim->world().agents.at(kVehicle).states[0], (DynamicState{20, -2, 0, 0}));
  EXPECT_GT(sim->world().agents.at(kVehicle).states[1].pose.x, 60.5);
}
