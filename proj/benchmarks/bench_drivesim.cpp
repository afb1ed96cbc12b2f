#include <benchmark/benchmark.h>

#include <cmath>
#include <filesystem>
#include <memory>
#include <random>

#include "drivesim/env.hpp"
#include "drivesim/geometry.hpp"
#include "drivesim/kinematics.hpp"
#include "drivesim/npc.hpp"
#include "drivesim/protocol.hpp"
#include "drivesim/renderer.hpp"
#include "drivesim/scenario.hpp"

using namespace drivesim;

namespace {

const std::filesystem::path kData = DRIVESIM_DATA_DIR;

Scenario scenario(const char* rel) {
  MapCache maps(kData / "maps");
  return load_scenario(kData / "scenarios" / (std::string(rel) + ".json"), maps);
}

}  // namespace

static void BM_RectsOverlap(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(-4, 4), ang(-3.14, 3.14), dim(0.5, 6);
  std::vector<std::pair<OrientedRect, OrientedRect>> pairs;
  for (int i = 0; i < 1024; ++i) {
    pairs.push_back({{Pose2(0, 0, ang(rng)), dim(rng), dim(rng)}, {Pose2(pos(rng), pos(rng), ang(rng)), dim(rng), dim(rng)}});
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [a, b] = pairs[i++ & 1023];
    benchmark::DoNotOptimize(rects_overlap(a, b));
  }
}
BENCHMARK(BM_RectsOverlap);

static void BM_BicycleStep(benchmark::State& state) {
  const auto model = KinematicModel::bicycle();
  const AgentAttributes attrs;
  DynamicState s(0, 0, 0.3, 6);
  const double a[2] = {0.05, 0.2};
  for (auto _ : state) {
    s = step(model, attrs, s, a, 0.1);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_BicycleStep);

static void BM_RenderBirdview(benchmark::State& state) {
  Env env(scenario("train/crowded_highway"));
  env.reset(0);
  for (auto _ : state) benchmark::DoNotOptimize(env.render_current());
}
BENCHMARK(BM_RenderBirdview);

static void BM_MockDrive(benchmark::State& state) {
  Env env(scenario("train/crowded_highway"));
  env.reset(0);
  const auto req = npc::build_drive_request(env.world());
  for (auto _ : state) benchmark::DoNotOptimize(npc::mock_drive(req));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(req.agents.size()));
}
BENCHMARK(BM_MockDrive);

static void EnvStep(benchmark::State& state, const char* rel, bool render) {
  EnvConfig cfg;
  cfg.render_observations = render;
  Env env(scenario(rel), std::make_shared<npc::LocalMockPolicy>(), cfg);
  env.reset(0);
  std::uint64_t episode = 0;
  int k = 0;
  for (auto _ : state) {
    if (env.done()) env.reset(++episode);
    benchmark::DoNotOptimize(env.step({0.05 * std::sin(++k * 0.1), 0.5}));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(EnvStep, ego_only, "train/empty_intersection", false);
BENCHMARK_CAPTURE(EnvStep, ego_only_rendered, "train/empty_intersection", true);
BENCHMARK_CAPTURE(EnvStep, traffic_rendered, "train/crowded_highway", true);

static void BM_ProtocolStep(benchmark::State& state) {
  auto set = std::make_shared<ScenarioSet>();
  set->scenarios.emplace("highway", scenario("train/crowded_highway"));
  set->default_name = "highway";
  ProtocolSession session(set);
  session.handle_line(R"({"op":"reset","seed":0})");
  for (auto _ : state) {
    auto reply = session.handle_line(R"({"op":"step","action":[0.0,0.3]})");
    if (reply && reply->find("\"done\":true") != std::string::npos) session.handle_line(R"({"op":"reset","seed":1})");
    benchmark::DoNotOptimize(reply);
  }
}
BENCHMARK(BM_ProtocolStep);
BENCHMARK_MAIN();
