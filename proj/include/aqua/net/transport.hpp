#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "aqua/metrics/report.hpp"
#include "aqua/net/topology.hpp"
#include "aqua/sim/simulator.hpp"

namespace aqua::net {

inline constexpr std::uint32_t kDefaultMtuPayload = 1500;
inline constexpr std::uint32_t kDefaultMaxAttempts = 16;

struct Packet {
  std::uint64_t flow_id;
  std::uint32_t seq;
  std::uint32_t payload_bytes;
  bool is_retransmission;
};

/// Reliable byte transfer along a fixed path.
///
/// Lost packets are re-sent by `retransmit_from` and re-traverse only the
/// links from that node to `dst`. A loss upstream of `retransmit_from` is
/// recovered by `src` over the upstream sub-path, so the relay behaves like a
/// split connection with its own buffer.
struct ReliableSession {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  Path path;
  NodeIndex retransmit_from = 0;
  std::uint64_t bytes_total = 0;
  /// Retransmission timeout of the relay leg. Negative means "derive":
  /// 2 x path_rtt(retransmit_from -> dst).
  double rto = -1.0;
  std::uint32_t max_attempts = kDefaultMaxAttempts;
  std::uint32_t mtu_payload = kDefaultMtuPayload;
  /// Rate at which the source emits packets; 0 releases everything at once.
  double source_rate = 0.0;
};

/// Builds a session with src/dst taken from `path` and the derived RTO.
/// `retransmit_from` defaults to the source.
ReliableSession make_session(const Topology& topology, Path path, std::uint64_t bytes,
                             std::optional<NodeIndex> retransmit_from = std::nullopt);

using SegmentCounters = std::array<std::uint64_t, kSegmentCount>;

struct TransferResult {
  double start_time = 0.0;
  double completion_time = 0.0;  // absolute
  SegmentCounters first_tx_bytes{};
  SegmentCounters retransmit_bytes{};
  std::uint64_t delivered_bytes = 0;
  std::uint64_t packets = 0;
  std::uint64_t retransmissions = 0;

  double duration() const noexcept { return completion_time - start_time; }
  std::uint64_t first_tx(Segment s) const { return first_tx_bytes[static_cast<std::size_t>(s)]; }
  std::uint64_t retransmitted(Segment s) const {
    return retransmit_bytes[static_cast<std::size_t>(s)];
  }
};

/// Links plus the per-link transmit state shared by every session of a run.
///
/// Each link is a FIFO store-and-forward server: a packet starts
/// serializing when it has fully arrived and the link is idle, and reaches
/// the next node `latency` seconds after its last bit leaves. Service times
/// are tracked per busy period (start time + bits since start) so
/// back-to-back packets finish at exactly `start + total_bits / rate`.
///
/// Loss for (flow, packet, hop, attempt) is a keyed draw from the run seed;
/// it does not depend on event timing.
class Network {
 public:
  using Callback = std::function<void(const TransferResult&)>;

  Network(sim::Simulator& sim, Topology topology, metrics::MetricsReport* report = nullptr);

  const Topology& topology() const noexcept { return topology_; }
  sim::Simulator& simulator() noexcept { return sim_; }

  /// Replaces a link's rate. Packets already serializing keep their old
  /// finish time.
  void set_link_rate(LinkIndex link, double rate);
  void set_link(LinkIndex link, const Link& params);

  /// Starts `session` at the current simulated time. `done` runs inside the
  /// event that delivers the last packet. Throws ConfigurationError for a
  /// malformed session; SessionFailed surfaces from the event loop.
  void start_transfer(const ReliableSession& session, Callback done);

  void validate(const ReliableSession& session) const;

 private:
  struct LinkState {
    double period_start = 0.0;
    double period_bits = 0.0;
  };
  struct Session;
  struct Copy;

  double busy_until(LinkIndex l) const;
  void release(const std::shared_ptr<Session>& s, std::uint32_t packet);
  void arrive(const std::shared_ptr<Session>& s, Copy copy, std::size_t hop);

  sim::Simulator& sim_;
  Topology topology_;
  metrics::MetricsReport* report_;
  std::vector<LinkState> link_state_;
  std::uint64_t next_flow_ = 0;
};

/// Runs `session` alone on a fresh simulator and returns its result.
TransferResult transfer(const Topology& topology, const ReliableSession& session,
                        std::uint64_t seed = 1);

/// "bytes.<segment>.first_tx" / "bytes.<segment>.retransmit".
std::string bytes_key(Segment s, bool retransmit);

}  // namespace aqua::net
