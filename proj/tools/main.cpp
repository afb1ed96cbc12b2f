#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "drivesim/golden.hpp"
#include "drivesim/rollout.hpp"
#include "drivesim/server.hpp"

namespace fs = std::filesystem;
using namespace drivesim;

namespace {

Server* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->shutdown();
}

// Accepts a path to a scenario file or a name such as "train/roundabout".
fs::path resolve_scenario(const std::string& arg, const fs::path& data_dir) {
  if (fs::exists(arg)) return arg;
  const fs::path named = data_dir / "scenarios" / (arg + ".json");
  if (fs::exists(named)) return named;
  throw ConfigError("no scenario " + arg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drivesim: birdview driving environment"};
  std::string scenario_arg;
  std::string policy = "idle";
  int episodes = 1;
  std::uint64_t seed = 0;
  std::string csv_path;
  std::string frames_dir;
  std::string serve_addr;
  std::string golden_dir;
  std::string data_dir = DRIVESIM_DEFAULT_DATA_DIR;
  bool no_render = false;

  app.add_option("--scenario", scenario_arg, "Scenario file or bundled name (train/roundabout)");
  app.add_option("--policy", policy, "idle, random, or a script file of 'steering acceleration' lines");
  app.add_option("--episodes", episodes, "Episodes to run")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Seed of the first episode");
  app.add_option("--csv", csv_path, "Metrics CSV output (stdout when omitted)");
  app.add_option("--frames", frames_dir, "Directory for PPM frame dumps");
  app.add_option("--serve", serve_addr, "Serve the JSON-lines protocol on host:port");
  app.add_option("--golden", golden_dir, "Write golden render fixtures into this directory");
  app.add_option("--data", data_dir, "Bundled data directory (maps/, scenarios/)");
  app.add_flag("--no-render", no_render, "Use the dummy backend for observations");
  CLI11_PARSE(app, argc, argv);

  try {
    EnvConfig env_cfg;
    env_cfg.render_observations = !no_render;

    if (!golden_dir.empty()) {
      for (const auto& p : write_goldens(data_dir, golden_dir)) std::cout << p.string() << '\n';
      return 0;
    }

    MapCache maps(fs::path(data_dir) / "maps");

    if (!serve_addr.empty()) {
      auto set = std::make_shared<ScenarioSet>();
      if (scenario_arg.empty()) {
        set->scenarios = load_scenario_dir(fs::path(data_dir) / "scenarios", maps);
        if (set->scenarios.empty()) throw ConfigError("no scenarios under " + data_dir);
        set->default_name = set->scenarios.begin()->first;
      } else {
        const fs::path path = resolve_scenario(scenario_arg, data_dir);
        set->default_name = scenario_arg;
        set->scenarios.emplace(scenario_arg, load_scenario(path, maps));
      }
      Server server(set, env_cfg);
      server.bind(parse_bind_address(serve_addr));
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving on port " << server.port() << std::endl;
      server.serve();
      g_server = nullptr;
      return 0;
    }

    if (scenario_arg.empty()) {
      std::cerr << "--scenario is required\n";
      return 2;
    }
    const Scenario scenario = load_scenario(resolve_scenario(scenario_arg, data_dir), maps);
    RolloutConfig cfg;
    cfg.episodes = episodes;
    cfg.seed = seed;
    cfg.env = env_cfg;
    if (!frames_dir.empty()) cfg.frames_dir = frames_dir;
    const auto rows = run_rollout(scenario, policy_from_arg(policy), cfg);

    if (csv_path.empty()) {
      write_metrics_csv(rows, std::cout);
    } else {
      std::ofstream out(csv_path);
      if (!out) throw ConfigError("cannot write " + csv_path);
      write_metrics_csv(rows, out);
      if (!out.flush()) throw ConfigError("write failed: " + csv_path);
    }
    std::cerr << format_aggregate(aggregate(rows));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "drivesim: " << e.what() << '\n';
    return 1;
  }
}
