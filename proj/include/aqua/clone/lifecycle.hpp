#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aqua::clone {

enum class CloneState { Absent, Spawning, Active, Migrating, Destroyed };

/// Transient clones live at an edge site; persistent ones in the central cloud.
enum class Tier { Transient, Persistent };

std::string_view state_name(CloneState s) noexcept;
std::string_view tier_name(Tier t) noexcept;

/// Absent->Spawning->Active, Active->Migrating->Active, Active->Destroyed.
constexpr bool is_legal_transition(CloneState from, CloneState to) noexcept {
  using enum CloneState;
  return (from == Absent && to == Spawning) || (from == Spawning && to == Active) ||
         (from == Active && to == Migrating) || (from == Migrating && to == Active) ||
         (from == Active && to == Destroyed);
}

struct TransitionRecord {
  std::uint64_t instance;
  std::string owner;
  Tier tier;
  CloneState from;
  CloneState to;
  double time;
};

/// Replays a transition log and reports every violation found: illegal
/// edges, records whose `from` disagrees with the instance's last state,
/// time going backwards, and two live instances of the same (owner, tier).
/// An empty result means the log is clean.
std::vector<std::string> audit_transitions(std::span<const TransitionRecord> log);

}  // namespace aqua::clone
