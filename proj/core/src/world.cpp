#include "drivesim/world.hpp"

#include <algorithm>

namespace drivesim {

std::size_t AgentBatch::count_present() const {
  return static_cast<std::size_t>(std::count(present.begin(), present.end(), true));
}

void AgentBatch::add(const AgentAttributes& a, const DynamicState& s, bool is_present) {
  validate_attributes(a);
  attrs.push_back(a);
  states.push_back(s);
  present.push_back(is_present);
}

const AgentBatch* WorldState::batch(const std::string& type) const {
  const auto it = agents.find(type);
  return it == agents.end() ? nullptr : &it->second;
}

const DynamicState& WorldState::state(const AgentRef& ref) const {
  return agents.at(ref.type).states.at(ref.index);
}

const AgentAttributes& WorldState::attributes(const AgentRef& ref) const {
  return agents.at(ref.type).attrs.at(ref.index);
}

bool WorldState::is_present(const AgentRef& ref) const {
  const AgentBatch* b = batch(ref.type);
  return b != nullptr && ref.index < b->size() && b->present[ref.index];
}

bool operator==(const WorldState& a, const WorldState& b) {
  const bool same_map = a.map == b.map || (a.map && b.map && *a.map == *b.map);
  return same_map && a.agents == b.agents && a.controls == b.controls &&
         a.step_index == b.step_index && a.dt == b.dt && a.has_ego == b.has_ego;
}

ActionMap zero_actions(const WorldState& w) {
  ActionMap out;
  for (const auto& [type, batch] : w.agents) {
    out[type].assign(batch.size(), Action(batch.model.action_dim(), 0.0));
  }
  return out;
}

WorldState world_step(const WorldState& w, const ActionMap& actions) {
  WorldState next = w;
  for (auto& [type, batch] : next.agents) {
    const auto it = actions.find(type);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!batch.present[i]) continue;
      if (it == actions.end() || i >= it->second.size() || it->second[i].empty()) {
        throw MissingActions(type, i);
      }
      batch.states[i] = step(batch.model, batch.attrs[i], batch.states[i], it->second[i], w.dt);
    }
  }
  next.step_index = w.step_index + 1;
  next.controls = advance_controls(std::move(next.controls), next.step_index);
  return next;
}

std::vector<AgentRef> present_agents(const WorldState& w) {
  std::vector<AgentRef> out;
  for (const auto& [type, batch] : w.agents) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch.present[i]) out.push_back({type, i});
    }
  }
  return out;
}

}  // namespace drivesim
