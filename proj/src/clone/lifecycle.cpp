#include "aqua/clone/lifecycle.hpp"

#include <map>
#include <utility>

namespace aqua::clone {

std::string_view state_name(CloneState s) noexcept {
  switch (s) {
    case CloneState::Absent:
      return "absent";
    case CloneState::Spawning:
      return "spawning";
    case CloneState::Active:
      return "active";
    case CloneState::Migrating:
      return "migrating";
    case CloneState::Destroyed:
      return "destroyed";
  }
  return "?";
}

std::string_view tier_name(Tier t) noexcept {
  return t == Tier::Transient ? "transient" : "persistent";
}

std::vector<std::string> audit_transitions(std::span<const TransitionRecord> log) {
  std::vector<std::string> problems;
  std::map<std::uint64_t, CloneState> state;
  std::map<std::pair<std::string, Tier>, std::uint64_t> live;
  double last_time = 0.0;

  auto describe = [](const TransitionRecord& r) {
    return "instance " + std::to_string(r.instance) + " (" + r.owner + "/" +
           std::string(tier_name(r.tier)) + ") " + std::string(state_name(r.from)) + "->" +
           std::string(state_name(r.to));
  };

  for (const auto& r : log) {
    if (r.time < last_time) problems.push_back(describe(r) + ": time went backwards");
    last_time = r.time;
    if (!is_legal_transition(r.from, r.to)) problems.push_back(describe(r) + ": illegal edge");

    auto [it, fresh] = state.try_emplace(r.instance, CloneState::Absent);
    if (it->second != r.from) {
      problems.push_back(describe(r) + ": instance was " + std::string(state_name(it->second)));
    }
    it->second = r.to;

    const auto key = std::make_pair(r.owner, r.tier);
    if (r.from == CloneState::Absent) {
      auto [lit, inserted] = live.try_emplace(key, r.instance);
      if (!inserted && lit->second != r.instance) {
        problems.push_back(describe(r) + ": owner already has a live clone in this tier");
      }
    } else if (r.to == CloneState::Destroyed) {
      live.erase(key);
    }
  }
  return problems;
}

}  // namespace aqua::clone
