#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "aqua/sim/random.hpp"

namespace aqua::sim {

/// Simulated time in seconds.
using SimTime = double;

using EventHandle = std::uint64_t;

struct SimConfig {
  std::uint64_t seed = 1;
  SimTime horizon = 1.0e6;

  /// Throws ConfigurationError unless horizon is finite and positive.
  void validate() const;
};

/// One executed event as seen by the trace recorder.
struct TraceEntry {
  SimTime time;
  std::uint64_t sequence;
  std::string label;
};

/// Single-threaded discrete-event kernel.
///
/// Events are ordered by (fire time, insertion sequence); equal times run in
/// the order they were scheduled. Exceptions thrown by an action propagate
/// out of run_until()/run() and leave the remaining queue untouched.
class Simulator {
 public:
  using Action = std::function<void()>;

  explicit Simulator(std::uint64_t seed = 1) : rng_(seed) {}
  explicit Simulator(const SimConfig& config);

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  SimTime now() const noexcept { return now_; }

  /// Queues `action` at absolute time `at`. Rejects times before now().
  EventHandle schedule(SimTime at, Action action, std::string label = {});
  EventHandle schedule_in(SimTime delay, Action action, std::string label = {});

  /// Marks a pending event so it is skipped. Returns false if unknown or
  /// already executed.
  bool cancel(EventHandle handle);

  /// Executes every event with fire time <= t, then sets the clock to t.
  SimTime run_until(SimTime t);

  /// Drains the queue. Returns the time of the last executed event.
  SimTime run();

  std::size_t pending() const noexcept { return live_.size(); }
  std::uint64_t executed() const noexcept { return executed_; }

  Rng& rng() noexcept { return rng_; }
  double draw_uniform() noexcept { return rng_.uniform(); }

  void enable_trace(bool on = true) { tracing_ = on; }
  bool tracing() const noexcept { return tracing_; }
  const std::vector<TraceEntry>& trace() const noexcept { return trace_; }
  /// One line per executed event: "<time %.9f> <sequence> <label>".
  std::string serialize_trace() const;

 private:
  struct Event {
    SimTime fire_at;
    std::uint64_t sequence;
    Action action;
    std::string label;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };

  bool step(SimTime limit);

  SimTime now_ = 0.0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t executed_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::set<EventHandle> live_;
  Rng rng_;
  bool tracing_ = false;
  std::vector<TraceEntry> trace_;
};

}  // namespace aqua::sim
