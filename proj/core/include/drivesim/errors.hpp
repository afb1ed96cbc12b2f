#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace drivesim {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedMap : public Error {
 public:
  explicit MalformedMap(const std::string& reason) : Error("malformed map: " + reason) {}
};

class EmptyMesh : public Error {
 public:
  EmptyMesh() : Error("map has no non-degenerate drivable triangles") {}
};

class MalformedScenario : public Error {
 public:
  explicit MalformedScenario(const std::string& reason)
      : Error("malformed scenario: " + reason) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("action dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)),
        expected(expected),
        got(got) {}
  std::size_t expected;
  std::size_t got;
};

class NonFiniteInput : public Error {
 public:
  explicit NonFiniteInput(const std::string& what) : Error("non-finite input: " + what) {}
};

class MissingActions : public Error {
 public:
  MissingActions(std::string agent_type, std::size_t index)
      : Error("missing action for " + agent_type + "[" + std::to_string(index) + "]"),
        agent_type(std::move(agent_type)),
        index(index) {}
  std::string agent_type;
  std::size_t index;
};

class AbsentAgent : public Error {
 public:
  AbsentAgent(const std::string& agent_type, std::size_t index)
      : Error("agent " + agent_type + "[" + std::to_string(index) + "] is not present") {}
};

// Raised by lifted functors; carries the agent type the inner call failed on.
class AgentTypeError : public Error {
 public:
  AgentTypeError(std::string agent_type, const std::string& inner)
      : Error(agent_type + ": " + inner), agent_type(std::move(agent_type)) {}
  std::string agent_type;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

class BackendUnavailable : public Error {
 public:
  explicit BackendUnavailable(const std::string& name)
      : Error("render backend unavailable: " + name) {}
};

class PlacementExhausted : public Error {
 public:
  explicit PlacementExhausted(std::size_t placed)
      : Error("placement exhausted after placing " + std::to_string(placed) + " agents"),
        placed(placed) {}
  std::size_t placed;
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t expected, std::size_t got)
      : Error("length mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

class HorizonExceeded : public Error {
 public:
  HorizonExceeded(long long t, std::size_t horizon)
      : Error("step " + std::to_string(t) + " beyond replay horizon " + std::to_string(horizon)) {}
};

class DriveCancelled : public Error {
 public:
  DriveCancelled() : Error("drive request cancelled") {}
};

class NotReset : public Error {
 public:
  NotReset() : Error("not reset") {}
};

class SteppedAfterDone : public Error {
 public:
  SteppedAfterDone() : Error("step called after episode end; call reset") {}
};

class IncompleteEpisode : public Error {
 public:
  IncompleteEpisode() : Error("episode has not ended") {}
};

class BindFailure : public Error {
 public:
  explicit BindFailure(const std::string& what) : Error("bind failure: " + what) {}
};

}  // namespace drivesim
