#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "drivesim/infraction.hpp"
#include "drivesim/npc.hpp"
#include "drivesim/renderer.hpp"
#include "drivesim/world.hpp"

namespace drivesim {

// Step/observe handle. Wrappers decorate another handle and keep the same interface.
class Simulator {
 public:
  virtual ~Simulator() = default;
  virtual const WorldState& world() const = 0;
  virtual WorldState& world_mut() = 0;
  virtual void step(const ActionMap& actions) = 0;
  // Next handle down the wrapper chain; null for the base simulator.
  virtual Simulator* inner() { return nullptr; }
};

class BaseSimulator : public Simulator {
 public:
  explicit BaseSimulator(WorldState w) : world_(std::move(w)) {}
  const WorldState& world() const override { return world_; }
  WorldState& world_mut() override { return world_; }
  void step(const ActionMap& actions) override { world_ = world_step(world_, actions); }

 private:
  WorldState world_;
};

class SimulatorWrapper : public Simulator {
 public:
  explicit SimulatorWrapper(std::unique_ptr<Simulator> inner);
  const WorldState& world() const override { return inner_->world(); }
  WorldState& world_mut() override { return inner_->world_mut(); }
  void step(const ActionMap& actions) override { inner_->step(actions); }
  Simulator* inner() override { return inner_.get(); }

 protected:
  std::unique_ptr<Simulator> inner_;
};

// Drives the listed rows of one agent type from recorded trajectories; any action given
// for them is ignored. Rows whose trajectory runs out become absent.
struct ReplayControllerConfig {
  std::string agent_type = kVehicle;
  std::vector<std::size_t> indices;
  // trajectories[k][t]: state of indices[k] at step t.
  std::vector<std::vector<DynamicState>> trajectories;
};

// Agents whose center leaves the area are marked absent after the step.
struct BoundaryRemovalConfig {
  Aabb area;
};

struct InfractionMonitorConfig {
  double lane_radius = kDefaultLaneRadius;
};

// Writes one PPM per step: <directory>/<prefix><step:06>.ppm.
struct FrameRecorderConfig {
  std::filesystem::path directory;
  RenderConfig render;
  std::string prefix = "frame_";
};

// Non-ego agents follow a behavior policy; their next states are teleported in.
struct NpcControllerConfig {
  std::shared_ptr<npc::BehaviorPolicy> policy;
  std::uint64_t seed = 0;
};

using WrapperKind = std::variant<ReplayControllerConfig, BoundaryRemovalConfig,
                                 InfractionMonitorConfig, FrameRecorderConfig, NpcControllerConfig>;

class ReplayController : public SimulatorWrapper {
 public:
  ReplayController(std::unique_ptr<Simulator> inner, ReplayControllerConfig cfg);
  void step(const ActionMap& actions) override;

 private:
  ReplayControllerConfig cfg_;
};

class BoundaryRemoval : public SimulatorWrapper {
 public:
  BoundaryRemoval(std::unique_ptr<Simulator> inner, BoundaryRemovalConfig cfg);
  void step(const ActionMap& actions) override;

 private:
  BoundaryRemovalConfig cfg_;
};

class InfractionMonitor : public SimulatorWrapper {
 public:
  using StepReports = std::map<AgentRef, InfractionReport>;

  InfractionMonitor(std::unique_ptr<Simulator> inner, InfractionMonitorConfig cfg);
  void step(const ActionMap& actions) override;

  const std::vector<StepReports>& history() const { return history_; }
  struct Totals {
    std::size_t collision = 0;
    std::size_t offroad = 0;
    std::size_t wrong_way = 0;
    std::size_t traffic_light = 0;
  };
  const Totals& totals() const { return totals_; }

 private:
  InfractionMonitorConfig cfg_;
  std::vector<StepReports> history_;
  Totals totals_;
};

class FrameRecorder : public SimulatorWrapper {
 public:
  FrameRecorder(std::unique_ptr<Simulator> inner, FrameRecorderConfig cfg);
  void step(const ActionMap& actions) override;
  std::size_t frames_written() const { return written_; }

 private:
  FrameRecorderConfig cfg_;
  std::size_t written_ = 0;
};

class NpcController : public SimulatorWrapper {
 public:
  NpcController(std::unique_ptr<Simulator> inner, NpcControllerConfig cfg);
  void step(const ActionMap& actions) override;

 private:
  NpcControllerConfig cfg_;
};

// Throws ConfigError when the wrapper config is invalid for the wrapped world.
std::unique_ptr<Simulator> wrap(std::unique_ptr<Simulator> sim, WrapperKind wrapper);

// Outermost wrapper of type T in the chain, or null.
template <class T>
T* find_wrapper(Simulator& sim) {
  for (Simulator* s = &sim; s != nullptr; s = s->inner()) {
    if (auto* t = dynamic_cast<T*>(s)) return t;
  }
  return nullptr;
}

}  // namespace drivesim
