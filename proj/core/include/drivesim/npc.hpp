#pragma once

#include <cstdint>
#include <deque>
#include <chrono>
#include <filesystem>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <stop_token>
#include <string>
#include <vector>

#include "drivesim/world.hpp"

namespace drivesim::npc {

struct AgentSpec {
  std::string type = kVehicle;
  AgentAttributes attrs;
  DynamicState state;

  friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

struct InitializeRequest {
  std::shared_ptr<const MapBundle> map;
  // Placed first, verbatim.
  std::vector<AgentSpec> predefined;
  std::size_t npc_count = 0;
  // Agent type per sampled agent; missing entries default to vehicle.
  std::vector<std::string> agent_types;
  AgentAttributes npc_attrs;
  // Control states as the caller wants them seen during placement.
  std::vector<TrafficControl> controls;
  std::uint64_t seed = 0;
};

struct InitializeResponse {
  std::vector<AgentSpec> agents;
};

struct DriveRequest {
  std::shared_ptr<const MapBundle> map;
  std::vector<AgentSpec> agents;
  std::vector<bool> present;
  std::vector<TrafficControl> controls;
  double dt = kDefaultDt;
  std::int64_t step_index = 0;
  std::uint64_t seed = 0;
};

// One next state per request agent.
struct DriveResponse {
  std::vector<DynamicState> states;
  std::vector<bool> present;

  friend bool operator==(const DriveResponse&, const DriveResponse&) = default;
};

// The INITIALIZE / DRIVE service contract. One caller at a time per instance; drive may
// block on a remote service and honors `stop`.
class BehaviorPolicy {
 public:
  virtual ~BehaviorPolicy() = default;
  virtual InitializeResponse initialize(const InitializeRequest& req) = 0;
  virtual DriveResponse drive(const DriveRequest& req, std::stop_token stop = {}) = 0;
};

struct PlacementConfig {
  double max_speed = 10.0;
  // A red light this close downstream forces a stationary placement.
  double red_light_distance = 15.0;
  std::size_t max_rejections = 1000;
  // Extra space kept around sampled agents, meters on each side.
  double longitudinal_clearance = 1.0;
  double lateral_clearance = 0.25;
};

struct DriverConfig {
  double lookahead = 5.0;
  double max_acceleration = 2.0;   // a_max
  double desired_speed = 8.0;      // v0
  double min_gap = 2.0;            // s0
  double time_headway = 1.5;       // T
  double max_deceleration = 5.0;   // plausibility bound, m/s^2
  double max_steering = 0.6;
  double lane_radius = kDefaultLaneRadius;
  double stop_line_range = 40.0;
  // Speed decay without a lane nearby.
  double idle_deceleration = 4.0;
};

InitializeResponse mock_initialize(const InitializeRequest& req, const PlacementConfig& cfg = {});

DriveResponse mock_drive(const DriveRequest& req, const DriverConfig& cfg = {},
                         std::stop_token stop = {});

// Longitudinal rule used by mock_drive; `gap` is bumper to bumper (infinity for none).
double car_following_acceleration(double speed, double gap, const DriverConfig& cfg);

// Non-ego rows in AgentMap order (types alphabetically, rows ascending).
std::vector<AgentRef> npc_refs(const WorldState& w);

// All rows, present or not, in AgentMap order.
DriveRequest build_drive_request(const WorldState& w, std::uint64_t seed = 0);

// Restricts a response for build_drive_request(w) to the rows npc_refs(w) lists.
DriveResponse npc_slice(const WorldState& w, const DriveResponse& full);

// Teleports every NPC to its response state; the ego row is never touched. Responses
// marking an agent absent clear its present flag.
WorldState apply_npc_states(const WorldState& w, const DriveResponse& npc_response);

struct ReplayLog {
  // steps[t][k]: state of agent k at step t. Shorter rows mean agents past their horizon.
  std::vector<std::vector<DynamicState>> steps;

  std::size_t horizon() const { return steps.size(); }
  friend bool operator==(const ReplayLog&, const ReplayLog&) = default;
};

// JSON lines: {"t": int, "agents": [[x, y, psi, v], ...]}.
ReplayLog read_replay_log(std::istream& in);
ReplayLog read_replay_log(const std::filesystem::path& path);
void write_replay_log(const ReplayLog& log, std::ostream& out);
void write_replay_log(const ReplayLog& log, const std::filesystem::path& path);

// Logged states at step t, padded to `agent_count` rows (0: the logged count). Agents
// without a logged state are reported absent.
DriveResponse replay_drive(const ReplayLog& log, std::int64_t t, std::size_t agent_count = 0);

class LocalMockPolicy : public BehaviorPolicy {
 public:
  explicit LocalMockPolicy(DriverConfig driver = {}, PlacementConfig placement = {})
      : driver_(driver), placement_(placement) {}
  InitializeResponse initialize(const InitializeRequest& req) override;
  DriveResponse drive(const DriveRequest& req, std::stop_token stop = {}) override;

 private:
  DriverConfig driver_;
  PlacementConfig placement_;
};

// Non-reactive log playback. DRIVE at step t returns the logged states for t + 1.
class ReplayPolicy : public BehaviorPolicy {
 public:
  explicit ReplayPolicy(ReplayLog log) : log_(std::move(log)) {}
  InitializeResponse initialize(const InitializeRequest& req) override;
  DriveResponse drive(const DriveRequest& req, std::stop_token stop = {}) override;

 private:
  ReplayLog log_;
};

// Stands in for the remote behavior service: records every request and answers with
// queued responses. With the queue empty, drive holds every agent in place.
class RemoteStubPolicy : public BehaviorPolicy {
 public:
  explicit RemoteStubPolicy(std::chrono::milliseconds latency = std::chrono::milliseconds{0})
      : latency_(latency) {}

  void queue_initialize(InitializeResponse r);
  void queue_drive(DriveResponse r);

  InitializeResponse initialize(const InitializeRequest& req) override;
  DriveResponse drive(const DriveRequest& req, std::stop_token stop = {}) override;

  std::vector<InitializeRequest> initialize_requests() const;
  std::vector<DriveRequest> drive_requests() const;

 private:
  void wait(std::stop_token stop) const;

  std::chrono::milliseconds latency_;
  mutable std::mutex mu_;
  std::deque<InitializeResponse> init_queue_;
  std::deque<DriveResponse> drive_queue_;
  std::vector<InitializeRequest> init_log_;
  std::vector<DriveRequest> drive_log_;
};

}  // namespace drivesim::npc
