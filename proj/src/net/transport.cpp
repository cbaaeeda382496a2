#include "aqua/net/transport.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "aqua/errors.hpp"

namespace aqua::net {

struct Network::Copy {
  std::uint32_t packet;
  std::uint32_t attempt;
  std::size_t origin;  // hop index the copy was (re)sent from
  double origin_time;  // when it started serializing at the origin
};

struct Network::Session {
  ReliableSession spec;
  std::uint64_t flow;
  std::size_t relay_hop;  // position of retransmit_from on the path
  double relay_rto;
  double upstream_rto;
  std::uint32_t packet_count;
  std::uint32_t delivered = 0;
  TransferResult result;
  Callback done;

  std::uint32_t payload(std::uint32_t p) const {
    const std::uint64_t offset = std::uint64_t{p} * spec.mtu_payload;
    return static_cast<std::uint32_t>(
        std::min<std::uint64_t>(spec.mtu_payload, spec.bytes_total - offset));
  }
};

std::string bytes_key(Segment s, bool retransmit) {
  std::string key = "bytes.";
  key += segment_name(s);
  key += retransmit ? ".retransmit" : ".first_tx";
  return key;
}

ReliableSession make_session(const Topology& topology, Path path, std::uint64_t bytes,
                             std::optional<NodeIndex> retransmit_from) {
  if (path.empty()) throw ConfigurationError("session path must not be empty");
  topology.check_contiguous(path);
  ReliableSession s;
  s.src = topology.link(path.front()).from;
  s.dst = topology.link(path.back()).to;
  s.retransmit_from = retransmit_from.value_or(s.src);
  s.path = std::move(path);
  s.bytes_total = bytes;
  return s;
}

Network::Network(sim::Simulator& sim, Topology topology, metrics::MetricsReport* report)
    : sim_(sim),
      topology_(std::move(topology)),
      report_(report),
      link_state_(topology_.link_count()) {}

double Network::busy_until(LinkIndex l) const {
  const auto& st = link_state_[l];
  return st.period_start + st.period_bits / topology_.link(l).params.rate;
}

void Network::set_link_rate(LinkIndex link, double rate) {
  Link params = topology_.link(link).params;
  params.rate = rate;
  set_link(link, params);
}

void Network::set_link(LinkIndex link, const Link& params) {
  params.validate();
  // Close the current busy period under the old rate.
  auto& st = link_state_.at(link);
  st.period_start = busy_until(link);
  st.period_bits = 0.0;
  topology_.link(link).params = params;
}

void Network::validate(const ReliableSession& s) const {
  if (s.path.empty()) throw ConfigurationError("session path must not be empty");
  topology_.check_contiguous(s.path);
  if (topology_.link(s.path.front()).from != s.src || topology_.link(s.path.back()).to != s.dst) {
    throw ConfigurationError("session path does not connect src to dst");
  }
  if (s.bytes_total == 0) throw ConfigurationError("session bytes_total must be > 0");
  if (s.mtu_payload == 0) throw ConfigurationError("session MTU payload must be > 0");
  if (!std::isfinite(s.source_rate) || s.source_rate < 0.0) {
    throw ConfigurationError("session source rate must be finite and >= 0");
  }
  if (std::isnan(s.rto)) throw ConfigurationError("session RTO is NaN");
  for (LinkIndex l : s.path) topology_.link(l).params.validate();
  const auto nodes = topology_.nodes_on(s.path);
  // The destination cannot retransmit to itself.
  if (std::find(nodes.begin(), nodes.end() - 1, s.retransmit_from) == nodes.end() - 1) {
    throw ConfigurationError("retransmit_from is not on the session path");
  }
  if (s.bytes_total / s.mtu_payload >= std::uint64_t{0xffffffffu}) {
    throw ConfigurationError("session has too many packets");
  }
}

void Network::start_transfer(const ReliableSession& spec, Callback done) {
  validate(spec);
  auto s = std::make_shared<Session>();
  s->spec = spec;
  s->flow = next_flow_++;
  const auto nodes = topology_.nodes_on(spec.path);
  s->relay_hop = static_cast<std::size_t>(
      std::find(nodes.begin(), nodes.end(), spec.retransmit_from) - nodes.begin());
  const Path relay_leg(spec.path.begin() + static_cast<std::ptrdiff_t>(s->relay_hop),
                       spec.path.end());
  const Path upstream_leg(spec.path.begin(),
                          spec.path.begin() + static_cast<std::ptrdiff_t>(s->relay_hop));
  s->relay_rto = spec.rto >= 0.0 ? spec.rto : 2.0 * path_rtt(topology_, relay_leg);
  s->upstream_rto = 2.0 * path_rtt(topology_, upstream_leg);
  s->packet_count = static_cast<std::uint32_t>((spec.bytes_total + spec.mtu_payload - 1) /
                                               spec.mtu_payload);
  s->result.start_time = sim_.now();
  s->result.packets = s->packet_count;
  s->done = std::move(done);
  release(s, 0);
}

void Network::release(const std::shared_ptr<Session>& s, std::uint32_t packet) {
  arrive(s, Copy{packet, 0, 0, 0.0}, 0);
  const std::uint32_t next = packet + 1;
  if (next >= s->packet_count) return;
  double at = s->result.start_time;
  if (s->spec.source_rate > 0.0) {
    const double bits = static_cast<double>(std::uint64_t{next} * s->spec.mtu_payload) * 8.0;
    at += bits / s->spec.source_rate;
  }
  sim_.schedule(at, [this, s, next] { release(s, next); },
                sim_.tracing() ? "release f" + std::to_string(s->flow) + " p" + std::to_string(next)
                               : std::string{});
}

void Network::arrive(const std::shared_ptr<Session>& s, Copy copy, std::size_t hop) {
  const auto& path = s->spec.path;
  const std::uint32_t bytes = s->payload(copy.packet);
  if (hop == path.size()) {
    s->result.delivered_bytes += bytes;
    if (++s->delivered == s->packet_count) {
      s->result.completion_time = sim_.now();
      if (s->done) s->done(s->result);
    }
    return;
  }

  const LinkIndex l = path[hop];
  const Link& link = topology_.link(l).params;
  auto& st = link_state_[l];
  const double now = sim_.now();
  const double bits = static_cast<double>(bytes) * 8.0;
  const double free_at = busy_until(l);
  double start;
  if (now >= free_at) {
    st.period_start = now;
    st.period_bits = 0.0;
    start = now;
  } else {
    start = free_at;
  }
  st.period_bits += bits;
  const double tx_end = busy_until(l);

  const bool retx = copy.attempt > 0;
  auto& counters = retx ? s->result.retransmit_bytes : s->result.first_tx_bytes;
  counters[static_cast<std::size_t>(link.segment)] += bytes;
  if (report_) report_->record(bytes_key(link.segment, retx), bytes);

  if (hop == copy.origin) copy.origin_time = start;

  const bool lost =
      link.loss_prob > 0.0 &&
      sim_.rng().keyed_uniform({s->flow, copy.packet, hop, copy.attempt}) < link.loss_prob;

  if (!lost) {
    sim_.schedule(tx_end + link.latency, [this, s, copy, hop] { arrive(s, copy, hop + 1); },
                  sim_.tracing() ? "hop f" + std::to_string(s->flow) + " p" +
                                       std::to_string(copy.packet) + " h" + std::to_string(hop + 1)
                                 : std::string{});
    return;
  }

  if (copy.attempt >= s->spec.max_attempts) {
    throw SessionFailed("packet " + std::to_string(copy.packet) + " of flow " +
                        std::to_string(s->flow) + " exceeded " +
                        std::to_string(s->spec.max_attempts) + " retransmissions");
  }
  ++s->result.retransmissions;
  const bool relay_leg = hop >= s->relay_hop;
  Copy again{copy.packet, copy.attempt + 1, relay_leg ? s->relay_hop : 0, 0.0};
  const double rto = relay_leg ? s->relay_rto : s->upstream_rto;
  const double resend_at = std::max(tx_end, copy.origin_time + rto);
  sim_.schedule(resend_at, [this, s, again] { arrive(s, again, again.origin); },
                sim_.tracing() ? "retx f" + std::to_string(s->flow) + " p" +
                                     std::to_string(again.packet) + " a" +
                                     std::to_string(again.attempt)
                               : std::string{});
}

TransferResult transfer(const Topology& topology, const ReliableSession& session,
                        std::uint64_t seed) {
  sim::Simulator sim(seed);
  Network net(sim, topology);
  TransferResult out;
  bool finished = false;
  net.start_transfer(session, [&](const TransferResult& r) {
    out = r;
    finished = true;
  });
  sim.run();
  if (!finished) throw InternalError("transfer ended without delivering every packet");
  return out;
}

}  // namespace aqua::net
