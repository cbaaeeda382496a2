#include "aqua/net/topology.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <limits>

#include "aqua/errors.hpp"

namespace aqua::net {
namespace {

constexpr std::array<std::string_view, kSegmentCount> kSegmentNames = {
    "access_up", "access_down", "fronthaul", "backhaul", "intra_cloud"};

constexpr std::array<std::string_view, 5> kNodeKindNames = {
    "device", "base_station", "edge_site", "central_cloud", "internet_server"};

}  // namespace

std::string_view segment_name(Segment s) noexcept {
  return kSegmentNames[static_cast<std::size_t>(s)];
}

std::string_view node_kind_name(NodeKind k) noexcept {
  return kNodeKindNames[static_cast<std::size_t>(k)];
}

std::optional<Segment> parse_segment(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kSegmentNames.size(); ++i) {
    if (kSegmentNames[i] == name) return static_cast<Segment>(i);
  }
  return std::nullopt;
}

std::optional<NodeKind> parse_node_kind(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNodeKindNames.size(); ++i) {
    if (kNodeKindNames[i] == name) return static_cast<NodeKind>(i);
  }
  return std::nullopt;
}

Segment reverse_segment(Segment s) noexcept {
  switch (s) {
    case Segment::AccessUp:
      return Segment::AccessDown;
    case Segment::AccessDown:
      return Segment::AccessUp;
    default:
      return s;
  }
}

void Link::validate() const {
  if (std::isnan(rate) || rate <= 0.0) {
    throw ConfigurationError("link rate must be > 0");
  }
  if (!std::isfinite(latency) || latency < 0.0) {
    throw ConfigurationError("link latency must be finite and >= 0");
  }
  if (!(loss_prob >= 0.0 && loss_prob < 1.0)) {
    throw ConfigurationError("link loss probability must be in [0, 1)");
  }
}

NodeIndex Topology::add_node(std::string label, NodeKind kind) {
  if (label.empty()) throw ConfigurationError("node label must not be empty");
  if (find_node(label)) throw ConfigurationError("duplicate node label '" + label + "'");
  nodes_.push_back(Node{std::move(label), kind});
  return nodes_.size() - 1;
}

LinkIndex Topology::add_link(NodeIndex from, NodeIndex to, const Link& link) {
  if (from >= nodes_.size() || to >= nodes_.size()) {
    throw ConfigurationError("link endpoint out of range");
  }
  link.validate();
  links_.push_back(LinkRecord{from, to, link});
  return links_.size() - 1;
}

LinkIndex Topology::add_link(std::string_view from, std::string_view to, const Link& link) {
  return add_link(node_index(from), node_index(to), link);
}

std::pair<LinkIndex, LinkIndex> Topology::add_duplex(std::string_view from, std::string_view to,
                                                     const Link& link) {
  Link back = link;
  back.segment = reverse_segment(link.segment);
  const LinkIndex a = add_link(from, to, link);
  const LinkIndex b = add_link(to, from, back);
  return {a, b};
}

std::optional<NodeIndex> Topology::find_node(std::string_view label) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].label == label) return i;
  }
  return std::nullopt;
}

NodeIndex Topology::node_index(std::string_view label) const {
  if (auto i = find_node(label)) return *i;
  throw ConfigurationError("unknown node '" + std::string(label) + "'");
}

std::optional<LinkIndex> Topology::find_link(NodeIndex from, NodeIndex to) const {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (links_[i].from == from && links_[i].to == to) return i;
  }
  return std::nullopt;
}

Path Topology::route(NodeIndex from, NodeIndex to) const {
  if (from >= nodes_.size() || to >= nodes_.size()) {
    throw ConfigurationError("route endpoint out of range");
  }
  if (from == to) return {};
  constexpr auto kNone = std::numeric_limits<LinkIndex>::max();
  std::vector<LinkIndex> via(nodes_.size(), kNone);
  std::vector<bool> seen(nodes_.size(), false);
  std::deque<NodeIndex> frontier{from};
  seen[from] = true;
  while (!frontier.empty()) {
    const NodeIndex n = frontier.front();
    frontier.pop_front();
    if (n == to) break;
    for (std::size_t l = 0; l < links_.size(); ++l) {
      const auto& rec = links_[l];
      if (rec.from != n || seen[rec.to]) continue;
      seen[rec.to] = true;
      via[rec.to] = l;
      frontier.push_back(rec.to);
    }
  }
  if (!seen[to]) {
    throw ConfigurationError("no route from '" + nodes_[from].label + "' to '" +
                             nodes_[to].label + "'");
  }
  Path path;
  for (NodeIndex n = to; n != from; n = links_[via[n]].from) path.push_back(via[n]);
  return Path(path.rbegin(), path.rend());
}

Path Topology::route(std::string_view from, std::string_view to) const {
  return route(node_index(from), node_index(to));
}

Path Topology::path_through(std::span<const std::string> labels) const {
  Path path;
  for (std::size_t i = 1; i < labels.size(); ++i) {
    const auto a = node_index(labels[i - 1]);
    const auto b = node_index(labels[i]);
    auto l = find_link(a, b);
    if (!l) {
      throw ConfigurationError("no link '" + labels[i - 1] + "' -> '" + labels[i] + "'");
    }
    path.push_back(*l);
  }
  return path;
}

std::vector<NodeIndex> Topology::nodes_on(const Path& path) const {
  std::vector<NodeIndex> out;
  if (path.empty()) return out;
  out.push_back(link(path.front()).from);
  for (LinkIndex l : path) out.push_back(link(l).to);
  return out;
}

void Topology::check_contiguous(const Path& path) const {
  for (LinkIndex l : path) {
    if (l >= links_.size()) throw ConfigurationError("path references unknown link");
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (links_[path[i - 1]].to != links_[path[i]].from) {
      throw ConfigurationError("path is not contiguous at hop " + std::to_string(i));
    }
  }
}

double path_rtt(const Topology& topology, const Path& path) {
  return 2.0 * path_latency(topology, path);
}

double path_rtt(std::span<const Link> links) {
  double sum = 0.0;
  for (const auto& l : links) sum += l.latency;
  return 2.0 * sum;
}

double path_latency(const Topology& topology, const Path& path) {
  double sum = 0.0;
  for (LinkIndex l : path) sum += topology.link(l).params.latency;
  return sum;
}

}  // namespace aqua::net
