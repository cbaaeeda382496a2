#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqua/clone/clone_manager.hpp"
#include "aqua/net/topology.hpp"

namespace aqua::scenarios {

/// Node labels of the reference deployment.
inline constexpr const char* kBaseStation = "bs";
inline constexpr const char* kEdge = "edge";
inline constexpr const char* kEdge2 = "edge2";
inline constexpr const char* kCentral = "central";
inline constexpr const char* kServer = "server";

struct LinkOverride {
  std::string from;
  std::string to;
  std::optional<double> rate;
  std::optional<double> latency;
  std::optional<double> loss_prob;
  std::optional<net::Segment> segment;
};

struct TopologyParams {
  net::Link access{1.0e7, 0.005, 0.0, net::Segment::AccessUp};
  net::Link fronthaul{1.0e9, 0.0001, 0.0, net::Segment::Fronthaul};
  net::Link backhaul{1.0e9, 0.005, 0.0, net::Segment::Backhaul};
  net::Link intra_cloud{1.0e10, 0.0, 0.0, net::Segment::IntraCloud};
  std::uint32_t mtu = net::kDefaultMtuPayload;
  bool second_site = false;
  std::vector<LinkOverride> links;  // applied after the defaults, in order
};

/// Builds the reference C-RAN deployment:
///
///   device --access-- bs --fronthaul-- edge --backhaul-- central
///                                        |
///                                     backhaul
///                                        |
///                                      server
///
/// Every link is duplex (the access link is AccessUp towards the base
/// station, AccessDown back). Each edge site also has an IntraCloud
/// self-loop that carries transfers between clones hosted at that site.
/// With `second_site`, "edge2" hangs off the same base station and central
/// cloud and connects to "edge" over a direct backhaul link.
net::Topology build_cran(const TopologyParams& params, std::span<const std::string> devices);

/// Returns `params` with every fronthaul link (defaults and overrides) at
/// zero latency and infinite rate: a base station with the mobile cloud
/// integrated into it.
TopologyParams without_fronthaul(TopologyParams params);

struct CloneParams {
  double cpu_capacity = 1.0e10;              // per transient clone
  std::uint64_t storage_capacity = 1000000000;  // bytes
  std::uint64_t profile_size = 0;            // bytes pulled on spawn
  std::size_t slot_capacity = 16;            // per edge site
  double cpu_pool = 1.6e11;                  // per edge site
};

/// Registers the reference edge sites ("edge", plus "edge2" if present).
void add_edge_sites(clone::CloneManager& clones, const net::Topology& topo,
                    const CloneParams& params);

/// The self-loop at `site`.
net::Path intra_site_path(const net::Topology& topo, const std::string& site);

}  // namespace aqua::scenarios
