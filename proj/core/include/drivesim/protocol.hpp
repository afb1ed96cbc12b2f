#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drivesim/env.hpp"

namespace drivesim {

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws Error on characters outside the standard alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Immutable scenario catalogue shared by every connection.
struct ScenarioSet {
  std::map<std::string, Scenario> scenarios;
  std::string default_name;

  const Scenario& get(const std::string& name) const;
};

// One environment driven by JSON lines: {"op": "spec"|"reset"|"step"|"close", ...}.
class ProtocolSession {
 public:
  explicit ProtocolSession(std::shared_ptr<const ScenarioSet> scenarios, EnvConfig cfg = {});

  // Response line without the trailing newline; nullopt for blank input.
  std::optional<std::string> handle_line(std::string_view line);
  bool closed() const { return closed_; }
  const Env* env() const { return env_.get(); }

 private:
  std::shared_ptr<const ScenarioSet> scenarios_;
  EnvConfig cfg_;
  std::unique_ptr<Env> env_;
  std::string env_scenario_;
  bool closed_ = false;
};

}  // namespace drivesim
