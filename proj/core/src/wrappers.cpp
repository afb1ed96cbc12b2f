#include "drivesim/wrappers.hpp"

#include <cstdio>

namespace drivesim {

namespace {

// Rows the caller left without an action get zeros so the inner step accepts them.
ActionMap fill_missing(const WorldState& w, ActionMap actions, const std::string& type,
                       const std::vector<std::size_t>& rows) {
  const AgentBatch* b = w.batch(type);
  if (b == nullptr) return actions;
  auto& list = actions[type];
  if (list.size() < b->size()) list.resize(b->size());
  for (const auto i : rows) {
    if (list[i].empty()) list[i].assign(b->model.action_dim(), 0.0);
  }
  return actions;
}

}  // namespace

SimulatorWrapper::SimulatorWrapper(std::unique_ptr<Simulator> inner) : inner_(std::move(inner)) {
  if (!inner_) throw ConfigError("wrapper needs a simulator to wrap");
}

ReplayController::ReplayController(std::unique_ptr<Simulator> inner, ReplayControllerConfig cfg)
    : SimulatorWrapper(std::move(inner)), cfg_(std::move(cfg)) {
  if (cfg_.indices.size() != cfg_.trajectories.size()) {
    throw ConfigError("replay controller needs one trajectory per controlled index");
  }
  const AgentBatch* b = world().batch(cfg_.agent_type);
  for (std::size_t k = 0; k < cfg_.indices.size(); ++k) {
    if (b == nullptr || cfg_.indices[k] >= b->size()) {
      throw ConfigError("replay controller index out of range");
    }
    if (cfg_.trajectories[k].empty()) throw ConfigError("replay controller trajectory is empty");
  }
}

void ReplayController::step(const ActionMap& actions) {
  inner_->step(fill_missing(world(), actions, cfg_.agent_type, cfg_.indices));
  WorldState& w = world_mut();
  AgentBatch& b = w.agents.at(cfg_.agent_type);
  const auto t = static_cast<std::size_t>(w.step_index);
  for (std::size_t k = 0; k < cfg_.indices.size(); ++k) {
    const std::size_t i = cfg_.indices[k];
    if (!b.present[i]) continue;
    if (t < cfg_.trajectories[k].size()) {
      b.states[i] = cfg_.trajectories[k][t];
    } else {
      b.present[i] = false;
    }
  }
}

BoundaryRemoval::BoundaryRemoval(std::unique_ptr<Simulator> inner, BoundaryRemovalConfig cfg)
    : SimulatorWrapper(std::move(inner)), cfg_(cfg) {
  if (!(cfg_.area.min.x <= cfg_.area.max.x) || !(cfg_.area.min.y <= cfg_.area.max.y)) {
    throw ConfigError("boundary area has min > max");
  }
}

void BoundaryRemoval::step(const ActionMap& actions) {
  inner_->step(actions);
  for (auto& [type, batch] : world_mut().agents) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch.present[i] && !cfg_.area.contains(batch.states[i].pose.position())) {
        batch.present[i] = false;
      }
    }
  }
}

InfractionMonitor::InfractionMonitor(std::unique_ptr<Simulator> inner, InfractionMonitorConfig cfg)
    : SimulatorWrapper(std::move(inner)), cfg_(cfg) {
  if (!(cfg_.lane_radius > 0.0)) throw ConfigError("infraction monitor lane radius must be positive");
}

void InfractionMonitor::step(const ActionMap& actions) {
  const WorldState before = world();
  inner_->step(actions);
  const WorldState& w = world();
  StepReports reports;
  for (const auto& ref : present_agents(w)) {
    const AgentBatch* pb = before.batch(ref.type);
    const DynamicState prev = pb != nullptr && ref.index < pb->size() ? pb->states[ref.index] : w.state(ref);
    const InfractionReport r = evaluate_infractions(w, ref, prev, cfg_.lane_radius);
    totals_.collision += r.collision;
    totals_.offroad += r.offroad;
    totals_.wrong_way += r.wrong_way;
    totals_.traffic_light += r.traffic_light;
    reports.emplace(ref, r);
  }
  history_.push_back(std::move(reports));
}

FrameRecorder::FrameRecorder(std::unique_ptr<Simulator> inner, FrameRecorderConfig cfg)
    : SimulatorWrapper(std::move(inner)), cfg_(std::move(cfg)) {
  if (cfg_.directory.empty()) throw ConfigError("frame recorder needs a directory");
  std::error_code ec;
  std::filesystem::create_directories(cfg_.directory, ec);
  if (ec) throw ConfigError("cannot create " + cfg_.directory.string() + ": " + ec.message());
}

void FrameRecorder::step(const ActionMap& actions) {
  inner_->step(actions);
  const WorldState& w = world();
  char name[32];
  std::snprintf(name, sizeof(name), "%06lld.ppm", static_cast<long long>(w.step_index));
  write_ppm(render_birdview(w, cfg_.render), cfg_.directory / (cfg_.prefix + name));
  ++written_;
}

NpcController::NpcController(std::unique_ptr<Simulator> inner, NpcControllerConfig cfg)
    : SimulatorWrapper(std::move(inner)), cfg_(std::move(cfg)) {
  if (!cfg_.policy) throw ConfigError("npc controller needs a behavior policy");
}

void NpcController::step(const ActionMap& actions) {
  const WorldState before = world();
  const npc::DriveResponse full = cfg_.policy->drive(npc::build_drive_request(before, cfg_.seed));
  ActionMap filled = actions;
  for (const auto& ref : npc::npc_refs(before)) {
    filled = fill_missing(before, std::move(filled), ref.type, {ref.index});
  }
  inner_->step(filled);
  WorldState& w = world_mut();
  w = npc::apply_npc_states(w, npc::npc_slice(before, full));
}

std::unique_ptr<Simulator> wrap(std::unique_ptr<Simulator> sim, WrapperKind wrapper) {
  return std::visit(
      [&sim](auto&& cfg) -> std::unique_ptr<Simulator> {
        using T = std::decay_t<decltype(cfg)>;
        if constexpr (std::is_same_v<T, ReplayControllerConfig>) {
          return std::make_unique<ReplayController>(std::move(sim), std::move(cfg));
        } else if constexpr (std::is_same_v<T, BoundaryRemovalConfig>) {
          return std::make_unique<BoundaryRemoval>(std::move(sim), cfg);
        } else if constexpr (std::is_same_v<T, InfractionMonitorConfig>) {
          return std::make_unique<InfractionMonitor>(std::move(sim), cfg);
        } else if constexpr (std::is_same_v<T, FrameRecorderConfig>) {
          return std::make_unique<FrameRecorder>(std::move(sim), std::move(cfg));
        } else {
          return std::make_unique<NpcController>(std::move(sim), std::move(cfg));
        }
      },
      std::move(wrapper));
}

}  // namespace drivesim
