#include "drivesim/protocol.hpp"

#include <array>
#include <cmath>

#include <nlohmann/json.hpp>

namespace drivesim {

using nlohmann::json;

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

struct RequestError : Error {
  using Error::Error;
};

json reward_json(const RewardConstants& r) {
  return {{"alpha1", r.alpha1},
          {"alpha2", r.alpha2},
          {"beta1", r.beta1},
          {"move_eps", r.move_eps},
          {"waypoint_radius", r.waypoint_radius}};
}

json step_info(const StepInfo& info) {
  json j = {{"collision", info.infractions.collision},
            {"offroad", info.infractions.offroad},
            {"wrong_way", info.infractions.wrong_way},
            {"traffic_light", info.infractions.traffic_light},
            {"applied_action", {info.applied_action.steering, info.applied_action.acceleration}},
            {"action_clipped", info.action_clipped},
            {"displacement", info.reward_terms.displacement},
            {"moved", info.reward_terms.moved},
            {"waypoint_hit", info.reward_terms.waypoint_hit},
            {"smoothness", info.reward_terms.smoothness},
            {"penalty", info.penalty},
            {"waypoints_reached", info.waypoints_reached},
            {"waypoints_remaining", info.waypoints_remaining},
            {"step", info.step}};
  j["ended_by"] = info.ended_by ? json(std::string(to_string(*info.ended_by))) : json(nullptr);
  return j;
}

std::string obs_payload(const Observation& obs) {
  const auto bytes = obs.to_bytes();
  return base64_encode(bytes);
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (const std::size_t rest = bytes.size() - i; rest > 0) {
    std::uint32_t v = bytes[i] << 16;
    if (rest == 2) v |= bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::array<int, 256> lookup;
  lookup.fill(-1);
  for (int k = 0; k < 64; ++k) lookup[static_cast<unsigned char>(kAlphabet[k])] = k;
  if (text.size() % 4 != 0) throw Error("base64 length not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int pad = 0;
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && last && k >= 2) {
        ++pad;
        v <<= 6;
        continue;
      }
      const int d = lookup[static_cast<unsigned char>(c)];
      if (d < 0 || pad > 0) throw Error("invalid base64 character");
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

const Scenario& ScenarioSet::get(const std::string& name) const {
  auto it = scenarios.find(name);
  if (it == scenarios.end()) throw ConfigError("unknown scenario: " + name);
  return it->second;
}

ProtocolSession::ProtocolSession(std::shared_ptr<const ScenarioSet> scenarios, EnvConfig cfg)
    : scenarios_(std::move(scenarios)), cfg_(cfg) {
  if (!scenarios_ || scenarios_->scenarios.empty()) throw ConfigError("empty scenario set");
}

std::optional<std::string> ProtocolSession::handle_line(std::string_view line) {
  if (line.find_first_not_of(" \t\r") == std::string_view::npos) return std::nullopt;

  json response;
  json id;
  try {
    const json req = json::parse(line);
    if (!req.is_object()) throw RequestError("request must be a JSON object");
    if (auto it = req.find("id"); it != req.end()) id = *it;
    const auto op_it = req.find("op");
    if (op_it == req.end() || !op_it->is_string()) throw RequestError("missing op");
    const std::string op = *op_it;

    if (op == "spec") {
      const std::string name = env_ ? env_scenario_ : scenarios_->default_name;
      const Scenario& sc = scenarios_->get(name);
      json names = json::array();
      for (const auto& [k, v] : scenarios_->scenarios) names.push_back(k);
      response = {{"ok", true},
                  {"action_bounds",
                   {{-kSteeringBound, kSteeringBound}, {-kAccelerationBound, kAccelerationBound}}},
                  {"obs_shape", Observation::shape()},
                  {"obs_dtype", "uint8"},
                  {"dt", sc.dt},
                  {"max_steps", sc.max_steps},
                  {"reward", reward_json(sc.reward)},
                  {"scenario", name},
                  {"scenarios", names}};
    } else if (op == "reset") {
      std::string name = env_ ? env_scenario_ : scenarios_->default_name;
      if (auto it = req.find("scenario"); it != req.end()) {
        if (!it->is_string()) throw RequestError("scenario must be a string");
        name = it->get<std::string>();
      }
      std::optional<std::uint64_t> seed;
      if (auto it = req.find("seed"); it != req.end() && !it->is_null()) {
        if (!it->is_number_unsigned()) throw RequestError("seed must be a non-negative integer");
        seed = it->get<std::uint64_t>();
      }
      const Scenario& sc = scenarios_->get(name);
      if (!env_ || name != env_scenario_) {
        env_ = std::make_unique<Env>(sc, nullptr, cfg_);
        env_scenario_ = name;
      }
      const ResetResult r = env_->reset(seed);
      response = {{"ok", true},
                  {"obs", obs_payload(r.obs)},
                  {"info",
                   {{"seed", r.info.seed},
                    {"spawn_index", r.info.spawn_index},
                    {"agent_count", r.info.agent_count},
                    {"waypoints_remaining", r.info.waypoints_remaining},
                    {"scenario", name}}}};
    } else if (op == "step") {
      if (!env_ || !env_->is_reset()) throw NotReset();
      const auto a = req.find("action");
      if (a == req.end() || !a->is_array() || a->size() != 2 || !(*a)[0].is_number() ||
          !(*a)[1].is_number()) {
        throw RequestError("action must be [steering, acceleration]");
      }
      const StepResult r = env_->step({(*a)[0].get<double>(), (*a)[1].get<double>()});
      response = {{"ok", true},
                  {"obs", obs_payload(r.obs)},
                  {"reward", r.reward},
                  {"terminated", r.terminated},
                  {"truncated", r.truncated},
                  {"info", step_info(r.info)}};
    } else if (op == "close") {
      env_.reset();
      env_scenario_.clear();
      closed_ = true;
      response = {{"ok", true}};
    } else {
      throw RequestError("unknown op: " + op);
    }
  } catch (const json::exception& e) {
    response = {{"ok", false}, {"error", std::string("bad request: ") + e.what()}};
  } catch (const std::exception& e) {
    response = {{"ok", false}, {"error", e.what()}};
  }
  if (!id.is_null()) response["id"] = id;
  return response.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace drivesim
