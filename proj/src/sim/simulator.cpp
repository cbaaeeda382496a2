#include "aqua/sim/simulator.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "aqua/errors.hpp"

namespace aqua::sim {

void SimConfig::validate() const {
  if (!std::isfinite(horizon) || horizon <= 0.0) {
    throw ConfigurationError("horizon must be finite and > 0");
  }
}

Simulator::Simulator(const SimConfig& config) : rng_(config.seed) { config.validate(); }

EventHandle Simulator::schedule(SimTime at, Action action, std::string label) {
  if (!std::isfinite(at)) {
    throw ConfigurationError("cannot schedule an event at a non-finite time");
  }
  if (at < now_) {
    throw ConfigurationError("cannot schedule an event in the past (t=" + std::to_string(at) +
                             ", now=" + std::to_string(now_) + ")");
  }
  const EventHandle handle = next_sequence_++;
  queue_.push(Event{at, handle, std::move(action), std::move(label)});
  live_.insert(handle);
  return handle;
}

EventHandle Simulator::schedule_in(SimTime delay, Action action, std::string label) {
  if (delay < 0.0) {
    throw ConfigurationError("negative event delay");
  }
  return schedule(now_ + delay, std::move(action), std::move(label));
}

bool Simulator::cancel(EventHandle handle) {
  // Cancelled events stay in the heap and are dropped when popped.
  return live_.erase(handle) > 0;
}

bool Simulator::step(SimTime limit) {
  while (!queue_.empty()) {
    if (queue_.top().fire_at > limit) return false;
    // priority_queue::top is const; moving out is safe because we pop next.
    Event ev = std::move(const_cast<Event&>(queue_.top()));
    queue_.pop();
    if (live_.erase(ev.sequence) == 0) continue;
    now_ = ev.fire_at;
    ++executed_;
    if (tracing_) trace_.push_back(TraceEntry{ev.fire_at, ev.sequence, ev.label});
    if (ev.action) ev.action();
    return true;
  }
  return false;
}

SimTime Simulator::run_until(SimTime t) {
  if (t < now_) {
    throw ConfigurationError("run_until target precedes the current clock");
  }
  while (step(t)) {
  }
  now_ = t;
  return now_;
}

SimTime Simulator::run() {
  while (step(std::numeric_limits<double>::infinity())) {
  }
  return now_;
}

std::string Simulator::serialize_trace() const {
  std::string out;
  char buf[64];
  for (const auto& e : trace_) {
    auto res = std::to_chars(buf, buf + sizeof buf, e.time, std::chars_format::fixed, 9);
    out.append(buf, res.ptr);
    out += ' ';
    out += std::to_string(e.sequence);
    out += ' ';
    out += e.label;
    out += '\n';
  }
  return out;
}

}  // namespace aqua::sim
