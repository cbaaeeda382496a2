#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aqua::net {

enum class NodeKind { Device, BaseStation, EdgeCloudSite, CentralCloud, InternetServer };

/// Which part of the operator network a link belongs to. Byte counters are
/// aggregated per segment.
enum class Segment { AccessUp, AccessDown, Fronthaul, Backhaul, IntraCloud };

inline constexpr std::size_t kSegmentCount = 5;

std::string_view segment_name(Segment s) noexcept;  // "access_up", ...
std::string_view node_kind_name(NodeKind k) noexcept;
std::optional<Segment> parse_segment(std::string_view name) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view name) noexcept;

/// AccessUp <-> AccessDown; every other segment maps to itself.
Segment reverse_segment(Segment s) noexcept;

/// Point-to-point, one-directional link.
///
/// `rate` may be +infinity, meaning the link adds no serialization delay
/// (used for a base station with an integrated mobile cloud).
struct Link {
  double rate = 1.0e9;  // bits/s
  double latency = 0.0; // s, one-way
  double loss_prob = 0.0;
  Segment segment = Segment::Backhaul;

  /// Throws ConfigurationError naming the violated bound.
  void validate() const;

  double serialization_time(std::uint64_t bytes) const noexcept {
    return static_cast<double>(bytes) * 8.0 / rate;
  }
};

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;
using Path = std::vector<LinkIndex>;

struct Node {
  std::string label;
  NodeKind kind;
};

struct LinkRecord {
  NodeIndex from;
  NodeIndex to;
  Link params;
};

class Topology {
 public:
  NodeIndex add_node(std::string label, NodeKind kind);
  LinkIndex add_link(NodeIndex from, NodeIndex to, const Link& link);
  LinkIndex add_link(std::string_view from, std::string_view to, const Link& link);

  /// Adds `from -> to` with `link` and `to -> from` with the mirrored segment.
  std::pair<LinkIndex, LinkIndex> add_duplex(std::string_view from, std::string_view to,
                                             const Link& link);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t link_count() const noexcept { return links_.size(); }

  const Node& node(NodeIndex i) const { return nodes_.at(i); }
  const LinkRecord& link(LinkIndex i) const { return links_.at(i); }
  LinkRecord& link(LinkIndex i) { return links_.at(i); }
  const std::vector<LinkRecord>& links() const noexcept { return links_; }

  std::optional<NodeIndex> find_node(std::string_view label) const;
  /// Throws ConfigurationError for unknown labels.
  NodeIndex node_index(std::string_view label) const;

  /// First link inserted from `from` to `to`.
  std::optional<LinkIndex> find_link(NodeIndex from, NodeIndex to) const;

  /// Fewest-hop path, ties broken by link insertion order. Empty when
  /// from == to. Throws ConfigurationError when unreachable.
  Path route(NodeIndex from, NodeIndex to) const;
  Path route(std::string_view from, std::string_view to) const;

  /// Links along an explicit node sequence.
  Path path_through(std::span<const std::string> labels) const;

  /// Nodes visited by `path`, starting with the first link's source.
  std::vector<NodeIndex> nodes_on(const Path& path) const;

  /// Throws ConfigurationError unless consecutive links share endpoints.
  void check_contiguous(const Path& path) const;

 private:
  std::vector<Node> nodes_;
  std::vector<LinkRecord> links_;
};

/// Twice the one-way latency sum along `path`.
double path_rtt(const Topology& topology, const Path& path);
double path_rtt(std::span<const Link> links);

/// Sum of one-way latencies along `path`.
double path_latency(const Topology& topology, const Path& path);

}  // namespace aqua::net
