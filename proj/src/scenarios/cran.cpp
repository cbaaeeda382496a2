#include "aqua/scenarios/cran.hpp"

#include <limits>

#include "aqua/errors.hpp"

namespace aqua::scenarios {
namespace {

net::Link with_segment(net::Link link, net::Segment s) {
  link.segment = s;
  return link;
}

}  // namespace

net::Topology build_cran(const TopologyParams& params, std::span<const std::string> devices) {
  using net::NodeKind;
  using net::Segment;
  net::Topology topo;
  for (const auto& d : devices) topo.add_node(d, NodeKind::Device);
  topo.add_node(kBaseStation, NodeKind::BaseStation);
  topo.add_node(kEdge, NodeKind::EdgeCloudSite);
  if (params.second_site) topo.add_node(kEdge2, NodeKind::EdgeCloudSite);
  topo.add_node(kCentral, NodeKind::CentralCloud);
  topo.add_node(kServer, NodeKind::InternetServer);

  const auto access = with_segment(params.access, Segment::AccessUp);
  const auto fronthaul = with_segment(params.fronthaul, Segment::Fronthaul);
  const auto backhaul = with_segment(params.backhaul, Segment::Backhaul);
  const auto intra = with_segment(params.intra_cloud, Segment::IntraCloud);

  for (const auto& d : devices) topo.add_duplex(d, kBaseStation, access);
  topo.add_duplex(kBaseStation, kEdge, fronthaul);
  topo.add_duplex(kEdge, kCentral, backhaul);
  topo.add_duplex(kServer, kEdge, backhaul);
  topo.add_link(kEdge, kEdge, intra);
  if (params.second_site) {
    topo.add_duplex(kEdge, kEdge2, backhaul);
    topo.add_duplex(kBaseStation, kEdge2, fronthaul);
    topo.add_duplex(kEdge2, kCentral, backhaul);
    topo.add_link(kEdge2, kEdge2, intra);
  }

  for (std::size_t i = 0; i < params.links.size(); ++i) {
    const auto& o = params.links[i];
    const std::string where = "topology.links[" + std::to_string(i) + "]";
    const auto from = topo.find_node(o.from);
    const auto to = topo.find_node(o.to);
    if (!from || !to) {
      throw ConfigurationError(where + ": unknown node '" + (from ? o.to : o.from) + "'");
    }
    const auto l = topo.find_link(*from, *to);
    if (!l) throw ConfigurationError(where + ": no link " + o.from + " -> " + o.to);
    auto& p = topo.link(*l).params;
    if (o.rate) p.rate = *o.rate;
    if (o.latency) p.latency = *o.latency;
    if (o.loss_prob) p.loss_prob = *o.loss_prob;
    if (o.segment) p.segment = *o.segment;
    try {
      p.validate();
    } catch (const ConfigurationError& e) {
      throw ConfigurationError(where + ": " + e.what());
    }
  }
  return topo;
}

TopologyParams without_fronthaul(TopologyParams params) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  params.fronthaul.latency = 0.0;
  params.fronthaul.rate = kInf;
  for (auto& o : params.links) {
    const bool is_fronthaul =
        o.segment ? *o.segment == net::Segment::Fronthaul
                  : ((o.from == kBaseStation && (o.to == kEdge || o.to == kEdge2)) ||
                     (o.to == kBaseStation && (o.from == kEdge || o.from == kEdge2)));
    if (is_fronthaul) {
      o.latency = 0.0;
      o.rate = kInf;
    }
  }
  return params;
}

void add_edge_sites(clone::CloneManager& clones, const net::Topology& topo,
                    const CloneParams& params) {
  clones.add_site({kEdge, params.slot_capacity, params.cpu_pool});
  if (topo.find_node(kEdge2)) clones.add_site({kEdge2, params.slot_capacity, params.cpu_pool});
}

net::Path intra_site_path(const net::Topology& topo, const std::string& site) {
  const auto n = topo.node_index(site);
  const auto l = topo.find_link(n, n);
  if (!l) throw ConfigurationError("site '" + site + "' has no intra-cloud link");
  return {*l};
}

}  // namespace aqua::scenarios
