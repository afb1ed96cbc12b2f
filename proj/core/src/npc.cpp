#include "drivesim/npc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "drivesim/infraction.hpp"
#include "drivesim/rng.hpp"

namespace drivesim::npc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Arc length along `lane` from `s` to the first point inside any of `rects`, scanning
// `range` meters ahead in 1 m pieces. Returns the index of the rect hit.
std::optional<std::pair<double, std::size_t>> first_rect_ahead(
    const Lane& lane, double s, double range, const std::vector<const OrientedRect*>& rects) {
  if (rects.empty()) return std::nullopt;
  constexpr double kPiece = 1.0;
  Vec2 prev = lane.point_at(s);
  for (double d = 0.0; d < range; d += kPiece) {
    const double step = std::min(kPiece, range - d);
    const Vec2 next = lane.point_at(s + d + step);
    std::optional<std::pair<double, std::size_t>> best;
    for (std::size_t i = 0; i < rects.size(); ++i) {
      if (const auto clip = clip_segment_to_rect(prev, next, *rects[i])) {
        const double at = d + (*clip)[0] * step;
        if (!best || at < best->first) best = {at, i};
      }
    }
    if (best) return best;
    prev = next;
  }
  return std::nullopt;
}

bool overlaps_any(const OrientedRect& r, const std::vector<AgentSpec>& agents) {
  return std::any_of(agents.begin(), agents.end(), [&r](const AgentSpec& a) {
    return rects_overlap(r, footprint(a.attrs, a.state));
  });
}

bool corners_drivable(const MapBundle& map, const OrientedRect& r) {
  const auto corners = rect_corners(r);
  return std::all_of(corners.begin(), corners.end(),
                     [&map](Vec2 c) { return point_on_drivable(map, c); });
}

}  // namespace

InitializeResponse mock_initialize(const InitializeRequest& req, const PlacementConfig& cfg) {
  if (!req.map) throw ConfigError("initialize request without a map");
  const MapBundle& map = *req.map;
  InitializeResponse resp;
  for (const auto& a : req.predefined) {
    validate_attributes(a.attrs);
    if (!map.mesh.bounds().contains(a.state.pose.position())) {
      throw ConfigError("predefined agent outside map bounds");
    }
    resp.agents.push_back(a);
  }
  if (req.npc_count == 0) return resp;
  validate_attributes(req.npc_attrs);

  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& lane : map.lanes) {
    total += lane.length();
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) throw PlacementExhausted(0);

  std::vector<const OrientedRect*> control_rects;
  for (const auto& c : req.controls) control_rects.push_back(&c.rect);

  Rng rng(req.seed);
  for (std::size_t k = 0; k < req.npc_count; ++k) {
    AgentSpec candidate;
    candidate.type = k < req.agent_types.size() ? req.agent_types[k] : kVehicle;
    candidate.attrs = req.npc_attrs;
    std::size_t rejections = 0;
    while (true) {
      if (rejections >= cfg.max_rejections) throw PlacementExhausted(k);
      const double u = rng.uniform(0.0, total);
      const auto lane_it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      const std::size_t lane_index =
          std::min<std::size_t>(static_cast<std::size_t>(lane_it - cumulative.begin()), map.lanes.size() - 1);
      const Lane& lane = map.lanes[lane_index];
      const double s = rng.uniform(0.0, lane.length());
      const Vec2 p = lane.point_at(s);
      double speed = rng.uniform(0.0, cfg.max_speed);
      if (const auto ahead = first_rect_ahead(lane, s, cfg.red_light_distance, control_rects)) {
        const auto& c = req.controls[ahead->second];
        if (c.kind == ControlKind::TrafficLight && c.state == LightState::Red) speed = 0.0;
      }
      candidate.state = DynamicState(p.x, p.y, lane.tangent_at(s), speed);

      const OrientedRect body = footprint(candidate.attrs, candidate.state);
      const OrientedRect padded{body.center, body.length + 2.0 * cfg.longitudinal_clearance,
                                body.width + 2.0 * cfg.lateral_clearance};
      bool ok = corners_drivable(map, body) && !overlaps_any(padded, resp.agents);
      if (ok) {
        const auto hit = nearest_lane_direction(map, p);
        ok = hit && std::abs(angle_diff(candidate.state.pose.psi(), hit->tangent)) <=
                        std::numbers::pi / 2.0;
      }
      if (ok) break;
      ++rejections;
    }
    resp.agents.push_back(candidate);
  }
  return resp;
}

double car_following_acceleration(double speed, double gap, const DriverConfig& cfg) {
  const double free_term = std::pow(speed / cfg.desired_speed, 2);
  double interaction = 0.0;
  if (std::isfinite(gap)) {
    const double desired_gap = cfg.min_gap + std::max(0.0, speed) * cfg.time_headway;
    interaction = std::pow(desired_gap / std::max(gap, 0.1), 2);
  }
  return cfg.max_acceleration * (1.0 - free_term - interaction);
}

DriveResponse mock_drive(const DriveRequest& req, const DriverConfig& cfg, std::stop_token stop) {
  if (!req.map) throw ConfigError("drive request without a map");
  const MapBundle& map = *req.map;
  const std::size_t n = req.agents.size();
  auto is_present = [&req](std::size_t i) { return i >= req.present.size() || req.present[i]; };

  DriveResponse resp;
  resp.states.reserve(n);
  resp.present.reserve(n);

  std::vector<const OrientedRect*> red_lights;
  for (const auto& c : req.controls) {
    if (c.kind == ControlKind::TrafficLight && c.state == LightState::Red) red_lights.push_back(&c.rect);
  }
  const KinematicModel model = KinematicModel::bicycle(
      {cfg.max_steering, -cfg.max_deceleration, cfg.max_acceleration});

  for (std::size_t i = 0; i < n; ++i) {
    if (stop.stop_requested()) throw DriveCancelled();
    const AgentSpec& self = req.agents[i];
    resp.present.push_back(is_present(i));
    if (!is_present(i)) {
      resp.states.push_back(self.state);
      continue;
    }
    const DynamicState& s = self.state;
    if (self.type == kStatic) {
      resp.states.emplace_back(s.pose.x, s.pose.y, s.pose.psi(), 0.0);
      continue;
    }
    const Vec2 pos = s.pose.position();
    const auto hit = nearest_aligned_lane(map, pos, s.pose.psi(), cfg.lane_radius);
    if (!hit) {
      DynamicState held = s;
      const double decay = cfg.idle_deceleration * req.dt;
      held.speed = std::abs(s.speed) <= decay ? 0.0 : s.speed - std::copysign(decay, s.speed);
      resp.states.push_back(held);
      continue;
    }
    const Lane& lane = map.lanes[hit->lane_index];
    const double lane_length = lane.length();

    // Lateral: pure pursuit on the centerline.
    const Vec2 target = lane.point_at(hit->arc_length + cfg.lookahead);
    const Vec2 to_target = target - pos;
    const double lookahead = norm(to_target);
    double steering = 0.0;
    if (lookahead > 1e-6) {
      const double alpha = angle_diff(std::atan2(to_target.y, to_target.x), s.pose.psi());
      const double curvature = 2.0 * std::sin(alpha) / lookahead;
      steering = std::asin(std::clamp(curvature * self.attrs.rear_axis_offset, -1.0, 1.0));
    }

    // Longitudinal: nearest leader occupying this lane ahead, or a red stop line.
    double gap = kInf;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !is_present(j)) continue;
      const AgentSpec& other = req.agents[j];
      if (std::abs(angle_diff(other.state.pose.psi(), s.pose.psi())) > std::numbers::pi / 2.0 &&
          std::abs(other.state.speed) > 0.1) {
        continue;  // oncoming traffic
      }
      const LaneProjection proj = lane.project(other.state.pose.position());
      if (proj.distance > 0.5 * (self.attrs.width + other.attrs.width)) continue;
      double ahead = proj.arc_length - hit->arc_length;
      if (lane.closed() && ahead < 0.0) ahead += lane_length;
      if (ahead <= 0.0) continue;
      gap = std::min(gap, ahead - 0.5 * (self.attrs.length + other.attrs.length));
    }
    if (const auto stop_line = first_rect_ahead(lane, hit->arc_length, cfg.stop_line_range, red_lights)) {
      const double to_line = stop_line->first - 0.5 * self.attrs.length;
      if (to_line > 0.0) gap = std::min(gap, to_line);
    }

    double accel = car_following_acceleration(s.speed, gap, cfg);
    accel = std::clamp(accel, -cfg.max_deceleration, cfg.max_acceleration);
    if (s.speed >= 0.0 && s.speed + accel * req.dt < 0.0) accel = -s.speed / req.dt;
    const double controls[2] = {steering, accel};
    resp.states.push_back(step(model, self.attrs, s, controls, req.dt));
  }
  return resp;
}

std::vector<AgentRef> npc_refs(const WorldState& w) {
  std::vector<AgentRef> out;
  for (const auto& [type, batch] : w.agents) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const AgentRef ref{type, i};
      if (!w.is_ego(ref)) out.push_back(ref);
    }
  }
  return out;
}

DriveRequest build_drive_request(const WorldState& w, std::uint64_t seed) {
  DriveRequest req;
  req.map = w.map;
  req.controls = w.controls;
  req.dt = w.dt;
  req.step_index = w.step_index;
  req.seed = seed;
  for (const auto& [type, batch] : w.agents) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      req.agents.push_back({type, batch.attrs[i], batch.states[i]});
      req.present.push_back(batch.present[i]);
    }
  }
  return req;
}

DriveResponse npc_slice(const WorldState& w, const DriveResponse& full) {
  DriveResponse out;
  std::size_t k = 0;
  for (const auto& [type, batch] : w.agents) {
    for (std::size_t i = 0; i < batch.size(); ++i, ++k) {
      if (w.is_ego({type, i})) continue;
      if (k >= full.states.size()) throw LengthMismatch(k + 1, full.states.size());
      out.states.push_back(full.states[k]);
      out.present.push_back(k < full.present.size() ? full.present[k] : true);
    }
  }
  return out;
}

WorldState apply_npc_states(const WorldState& w, const DriveResponse& npc_response) {
  const auto refs = npc_refs(w);
  if (npc_response.states.size() != refs.size()) {
    throw LengthMismatch(refs.size(), npc_response.states.size());
  }
  WorldState out = w;
  const KinematicModel teleport = KinematicModel::teleporting();
  for (std::size_t k = 0; k < refs.size(); ++k) {
    AgentBatch& batch = out.agents.at(refs[k].type);
    const std::size_t i = refs[k].index;
    if (!batch.present[i]) continue;
    if (k < npc_response.present.size() && !npc_response.present[k]) {
      batch.present[i] = false;
      continue;
    }
    const auto target = npc_response.states[k].as_array();
    batch.states[i] = step(teleport, batch.attrs[i], batch.states[i], target, w.dt);
  }
  return out;
}

ReplayLog read_replay_log(std::istream& in) {
  ReplayLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "replay log line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(where + ": " + e.what());
    }
    if (!j.contains("t") || !j["t"].is_number_integer() || !j.contains("agents")) {
      throw ConfigError(where + ": expected {\"t\": int, \"agents\": [...]}");
    }
    const auto t = j["t"].get<std::int64_t>();
    if (t != static_cast<std::int64_t>(log.steps.size())) {
      throw ConfigError(where + ": steps must be consecutive from 0");
    }
    std::vector<DynamicState> row;
    for (const auto& a : j["agents"]) {
      if (!a.is_array() || a.size() != 4) throw ConfigError(where + ": agent states need 4 numbers");
      const auto v = a.get<std::vector<double>>();
      for (double x : v) {
        if (!std::isfinite(x)) throw ConfigError(where + ": non-finite state");
      }
      row.push_back(DynamicState::from_array(v));
    }
    log.steps.push_back(std::move(row));
  }
  return log;
}

ReplayLog read_replay_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_replay_log(in);
}

void write_replay_log(const ReplayLog& log, std::ostream& out) {
  for (std::size_t t = 0; t < log.steps.size(); ++t) {
    nlohmann::json agents = nlohmann::json::array();
    for (const auto& s : log.steps[t]) agents.push_back(s.as_array());
    out << nlohmann::json{{"t", t}, {"agents", agents}}.dump() << '\n';
  }
}

void write_replay_log(const ReplayLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_replay_log(log, out);
}

DriveResponse replay_drive(const ReplayLog& log, std::int64_t t, std::size_t agent_count) {
  if (t < 0 || static_cast<std::size_t>(t) >= log.horizon()) throw HorizonExceeded(t, log.horizon());
  const auto& row = log.steps[static_cast<std::size_t>(t)];
  const std::size_t n = agent_count == 0 ? row.size() : agent_count;
  DriveResponse resp;
  for (std::size_t k = 0; k < n; ++k) {
    if (k < row.size()) {
      resp.states.push_back(row[k]);
      resp.present.push_back(true);
    } else {
      resp.states.emplace_back();
      resp.present.push_back(false);
    }
  }
  return resp;
}

InitializeResponse LocalMockPolicy::initialize(const InitializeRequest& req) {
  return mock_initialize(req, placement_);
}

DriveResponse LocalMockPolicy::drive(const DriveRequest& req, std::stop_token stop) {
  return mock_drive(req, driver_, stop);
}

InitializeResponse ReplayPolicy::initialize(const InitializeRequest& req) {
  InitializeResponse resp;
  resp.agents = req.predefined;
  if (log_.horizon() == 0) return resp;
  const auto& first = log_.steps.front();
  for (std::size_t k = req.predefined.size(); k < first.size(); ++k) {
    resp.agents.push_back({kVehicle, req.npc_attrs, first[k]});
  }
  return resp;
}

DriveResponse ReplayPolicy::drive(const DriveRequest& req, std::stop_token stop) {
  if (stop.stop_requested()) throw DriveCancelled();
  DriveResponse resp = replay_drive(log_, req.step_index + 1, req.agents.size());
  // Rows the log never covered keep their current state but drop out.
  for (std::size_t k = 0; k < resp.states.size(); ++k) {
    if (!resp.present[k]) resp.states[k] = req.agents[k].state;
  }
  return resp;
}

void RemoteStubPolicy::queue_initialize(InitializeResponse r) {
  std::lock_guard lock(mu_);
  init_queue_.push_back(std::move(r));
}

void RemoteStubPolicy::queue_drive(DriveResponse r) {
  std::lock_guard lock(mu_);
  drive_queue_.push_back(std::move(r));
}

void RemoteStubPolicy::wait(std::stop_token stop) const {
  using namespace std::chrono;
  const auto deadline = steady_clock::now() + latency_;
  while (steady_clock::now() < deadline) {
    if (stop.stop_requested()) throw DriveCancelled();
    std::this_thread::sleep_for(std::min<steady_clock::duration>(milliseconds{1}, deadline - steady_clock::now()));
  }
  if (stop.stop_requested()) throw DriveCancelled();
}

InitializeResponse RemoteStubPolicy::initialize(const InitializeRequest& req) {
  {
    std::lock_guard lock(mu_);
    init_log_.push_back(req);
  }
  wait({});
  std::lock_guard lock(mu_);
  if (init_queue_.empty()) return {req.predefined};
  InitializeResponse r = std::move(init_queue_.front());
  init_queue_.pop_front();
  return r;
}

DriveResponse RemoteStubPolicy::drive(const DriveRequest& req, std::stop_token stop) {
  {
    std::lock_guard lock(mu_);
    drive_log_.push_back(req);
  }
  wait(stop);
  std::lock_guard lock(mu_);
  if (drive_queue_.empty()) {
    DriveResponse hold;
    for (std::size_t k = 0; k < req.agents.size(); ++k) {
      hold.states.push_back(req.agents[k].state);
      hold.present.push_back(k >= req.present.size() || req.present[k]);
    }
    return hold;
  }
  DriveResponse r = std::move(drive_queue_.front());
  drive_queue_.pop_front();
  return r;
}

std::vector<InitializeRequest> RemoteStubPolicy::initialize_requests() const {
  std::lock_guard lock(mu_);
  return init_log_;
}

std::vector<DriveRequest> RemoteStubPolicy::drive_requests() const {
  std::lock_guard lock(mu_);
  return drive_log_;
}

}  // namespace drivesim::npc
