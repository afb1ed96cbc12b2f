#pragma once

// Shared JSON helpers for the map and scenario loaders. Internal to the core library.

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "drivesim/controls.hpp"
#include "drivesim/geometry.hpp"

namespace drivesim::detail {

using nlohmann::json;

template <class Error>
double finite_number(const json& j, const std::string& what) {
  if (!j.is_number()) throw Error(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(what + " must be finite");
  return v;
}

template <class Error>
Vec2 point2(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw Error(what + " must be [x, y]");
  return {finite_number<Error>(j[0], what + ".x"), finite_number<Error>(j[1], what + ".y")};
}

template <class Error>
const json& require(const json& obj, const char* key, const std::string& what) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(what + " is missing '" + key + "'");
  }
  return obj.at(key);
}

template <class Error>
OrientedRect rect_from(const json& j, const std::string& what) {
  const Vec2 c = point2<Error>(require<Error>(j, "center", what), what + ".center");
  const double psi = finite_number<Error>(require<Error>(j, "psi", what), what + ".psi");
  const double length = finite_number<Error>(require<Error>(j, "length", what), what + ".length");
  const double width = finite_number<Error>(require<Error>(j, "width", what), what + ".width");
  if (!(length > 0.0) || !(width > 0.0)) throw Error(what + " must have positive size");
  return {Pose2{c.x, c.y, psi}, length, width};
}

inline json rect_to_json(const OrientedRect& r) {
  return {{"center", {r.center.x, r.center.y}},
          {"psi", r.center.psi()},
          {"length", r.length},
          {"width", r.width}};
}

// Parses a control declaration; `rect` is left default when the entry omits it.
template <class Error>
TrafficControl control_from(const json& j, const std::string& what, bool* has_rect) {
  TrafficControl c;
  const auto& id = require<Error>(j, "id", what);
  if (!id.is_string()) throw Error(what + ".id must be a string");
  c.id = id.template get<std::string>();
  try {
    c.kind = control_kind_from_string(require<Error>(j, "kind", what).template get<std::string>());
    if (j.contains("program")) {
      for (const auto& phase : j.at("program")) {
        if (!phase.is_array() || phase.size() != 2 || !phase[1].is_number_integer()) {
          throw Error(what + ".program entries must be [state, steps]");
        }
        c.program.push_back(
            {light_state_from_string(phase[0].get<std::string>()), phase[1].get<std::int64_t>()});
      }
    }
  } catch (const json::exception& e) {
    throw Error(what + ": " + e.what());
  } catch (const ConfigError& e) {
    throw Error(what + ": " + e.what());
  }
  *has_rect = j.contains("rect");
  if (*has_rect) c.rect = rect_from<Error>(j.at("rect"), what + ".rect");
  return c;
}

inline json control_to_json(const TrafficControl& c, bool with_rect) {
  json j = {{"id", c.id}, {"kind", std::string(to_string(c.kind))}};
  if (!c.program.empty()) {
    json program = json::array();
    for (const auto& p : c.program) program.push_back({std::string(to_string(p.state)), p.duration});
    j["program"] = program;
  }
  if (with_rect) j["rect"] = rect_to_json(c.rect);
  return j;
}

}  // namespace drivesim::detail
