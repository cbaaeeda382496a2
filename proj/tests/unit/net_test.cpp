#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "aqua/errors.hpp"
#include "aqua/net/transport.hpp"

namespace {

using namespace aqua::net;

struct Chain {
  Topology topo;
  Path path;
};

/// n0 -> n1 -> ... -> nk with the given links.
Chain chain(const std::vector<Link>& links) {
  Chain c;
  for (std::size_t i = 0; i <= links.size(); ++i) {
    c.topo.add_node("n" + std::to_string(i), i == 0 ? NodeKind::InternetServer : NodeKind::BaseStation);
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    c.path.push_back(c.topo.add_link(i, i + 1, links[i]));
  }
  return c;
}

/// Store-and-forward tandem of FIFO links, lossless, all packets released
/// at t = 0 in order. Departure from link k of packet i is
/// max(arrival_k(i), departure_k(i-1)) + size_i / rate_k.
double tandem_completion(const std::vector<Link>& links, std::uint64_t bytes, std::uint32_t mtu) {
  std::vector<double> sizes;
  for (std::uint64_t off = 0; off < bytes; off += mtu) {
    sizes.push_back(static_cast<double>(std::min<std::uint64_t>(mtu, bytes - off)) * 8.0);
  }
  std::vector<double> arrival(sizes.size(), 0.0);
  for (const auto& l : links) {
    double prev = 0.0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const double dep = std::max(arrival[i], prev) + sizes[i] / l.rate;
      prev = dep;
      arrival[i] = dep + l.latency;
    }
  }
  return *std::max_element(arrival.begin(), arrival.end());
}

TEST(Link, ValidatesBounds) {
  EXPECT_THROW((Link{0.0, 0.0, 0.0}.validate()), aqua::ConfigurationError);
  EXPECT_THROW((Link{1.0, -1.0, 0.0}.validate()), aqua::ConfigurationError);
  EXPECT_THROW((Link{1.0, 0.0, 1.0}.validate()), aqua::ConfigurationError);
  EXPECT_THROW((Link{1.0, 0.0, 1.2}.validate()), aqua::ConfigurationError);
  EXPECT_THROW((Link{1.0, 0.0, -0.1}.validate()), aqua::ConfigurationError);
  EXPECT_NO_THROW((Link{std::numeric_limits<double>::infinity(), 0.0, 0.999}.validate()));
}

TEST(Topology, LabelsAreUnique) {
  Topology t;
  t.add_node("a", NodeKind::Device);
  EXPECT_THROW(t.add_node("a", NodeKind::BaseStation), aqua::ConfigurationError);
}

TEST(Topology, RouteTakesFewestHops) {
  Topology t;
  for (const char* n : {"a", "b", "c", "d"}) t.add_node(n, NodeKind::BaseStation);
  t.add_duplex("a", "b", {});
  t.add_duplex("b", "c", {});
  t.add_duplex("c", "d", {});
  t.add_duplex("a", "d", {});
  const auto p = t.route("a", "c");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(t.nodes_on(p).back(), t.node_index("c"));
  EXPECT_TRUE(t.route("a", "a").empty());
  EXPECT_EQ(t.route("a", "d").size(), 1u);
}

TEST(Topology, DuplexMirrorsAccessSegment) {
  Topology t;
  t.add_node("ue", NodeKind::Device);
  t.add_node("bs", NodeKind::BaseStation);
  auto [up, down] = t.add_duplex("ue", "bs", Link{1e6, 0.0, 0.0, Segment::AccessUp});
  EXPECT_EQ(t.link(up).params.segment, Segment::AccessUp);
  EXPECT_EQ(t.link(down).params.segment, Segment::AccessDown);
}

TEST(PathRtt, TwiceTheLatencySum) {
  EXPECT_DOUBLE_EQ(path_rtt(std::vector<Link>{{1e6, 0.01}}), 0.02);
  EXPECT_DOUBLE_EQ(path_rtt(std::vector<Link>{{1e6, 0.01}, {1e6, 0.005}}), 0.03);
}

TEST(PathRtt, ZeroFronthaulRemovesTwiceItsLatency) {
  const double fronthaul = 0.0009765625;
  const double base = path_rtt(std::vector<Link>{{1e6, 0.0078125}, {1e9, fronthaul}});
  const double evolved = path_rtt(std::vector<Link>{{1e6, 0.0078125}, {1e9, 0.0}});
  EXPECT_EQ(base - evolved, 2.0 * fronthaul);
}

TEST(Transfer, SinglePacketTwoHops) {
  auto c = chain({{1e6, 0.01}, {1e6, 0.01}});
  const auto r = transfer(c.topo, make_session(c.topo, c.path, 1500), 1);
  EXPECT_NEAR(r.duration(), 0.044, 1e-15);
  EXPECT_EQ(r.delivered_bytes, 1500u);
  EXPECT_EQ(r.first_tx(Segment::Backhaul), 3000u);
}

TEST(Transfer, LosslessMeansNoRetransmission) {
  auto c = chain({{1e6, 0.01, 0.0, Segment::Backhaul}, {1e6, 0.0, 0.0, Segment::AccessDown}});
  const auto r = transfer(c.topo, make_session(c.topo, c.path, 100000), 3);
  for (auto v : r.retransmit_bytes) EXPECT_EQ(v, 0u);
  EXPECT_EQ(r.retransmissions, 0u);
}

TEST(Transfer, MatchesTandemQueueOracle) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> rate(1e5, 1e8), lat(0.0, 0.02);
  std::uniform_int_distribution<std::uint64_t> bytes(1, 200000);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Link> links(1 + trial % 4);
    for (auto& l : links) l = Link{rate(gen), lat(gen)};
    auto c = chain(links);
    const auto b = bytes(gen);
    const auto r = transfer(c.topo, make_session(c.topo, c.path, b), 1);
    const double expect = tandem_completion(links, b, kDefaultMtuPayload);
    EXPECT_NEAR(r.duration(), expect, 1e-12 * expect) << "trial " << trial;
    EXPECT_EQ(r.delivered_bytes, b);
  }
}

TEST(Transfer, BackToBackPacketsFinishAtTotalBitsOverRate) {
  auto c = chain({{8.0e6, 0.0}});
  const auto r = transfer(c.topo, make_session(c.topo, c.path, 1000000), 1);
  EXPECT_EQ(r.duration(), 1.0);
}

TEST(Transfer, CloneRelayShieldsUpstream) {
  // server -(backhaul, lossless)-> clone -(wireless, 5 %)-> device,
  // 10^4 packets.
  const double p = 0.05;
  auto c = chain({{1e9, 0.005, 0.0, Segment::Backhaul}, {1e7, 0.002, p, Segment::AccessDown}});
  const std::uint64_t bytes = 15000000;
  auto s = make_session(c.topo, c.path, bytes, NodeIndex{1});
  const auto r = transfer(c.topo, s, 4);
  EXPECT_EQ(r.retransmitted(Segment::Backhaul), 0u);
  const double expect = static_cast<double>(bytes) * p / (1.0 - p);
  EXPECT_NEAR(static_cast<double>(r.retransmitted(Segment::AccessDown)), expect, 0.1 * expect);
  EXPECT_EQ(r.delivered_bytes, bytes);
}

TEST(Transfer, EndToEndRecoveryLoadsEverySegment) {
  const double p = 0.05;
  auto c = chain({{1e9, 0.005, 0.0, Segment::Backhaul}, {1e7, 0.002, p, Segment::AccessDown}});
  const std::uint64_t bytes = 15000000;
  const auto r = transfer(c.topo, make_session(c.topo, c.path, bytes), 4);
  const double expect = static_cast<double>(bytes) * p / (1.0 - p);
  EXPECT_NEAR(static_cast<double>(r.retransmitted(Segment::Backhaul)), expect, 0.1 * expect);
  EXPECT_EQ(r.retransmitted(Segment::Backhaul), r.retransmitted(Segment::AccessDown));
}

TEST(Transfer, GeometricExpectationOverSeeds) {
  // Per-link retransmit bytes / bytes_total converges to p / (1 - p).
  for (double p : {0.01, 0.1, 0.3}) {
    auto c = chain({{1e8, 0.001, p, Segment::AccessDown}});
    double total = 0.0;
    const std::uint64_t bytes = 1500 * 10000;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      total += static_cast<double>(
          transfer(c.topo, make_session(c.topo, c.path, bytes), seed).retransmitted(Segment::AccessDown));
    }
    const double mean = total / 5.0;
    const double expect = static_cast<double>(bytes) * p / (1.0 - p);
    EXPECT_NEAR(mean, expect, 0.1 * expect) << "p=" << p;
  }
}

TEST(Transfer, UpstreamOfRelayNeverRetransmits) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> loss(0.0, 0.5), lat(0.0, 0.01);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t hops = 2 + static_cast<std::size_t>(trial % 3);
    const std::size_t relay = 1 + static_cast<std::size_t>(trial) % (hops - 1);
    std::vector<Link> links(hops);
    for (std::size_t h = 0; h < hops; ++h) {
      links[h] = Link{1e7, lat(gen), h >= relay ? loss(gen) : 0.0,
                      h >= relay ? Segment::AccessDown : Segment::Backhaul};
    }
    auto c = chain(links);
    const auto r = transfer(c.topo, make_session(c.topo, c.path, 300000, NodeIndex{relay}),
                            static_cast<std::uint64_t>(trial));
    EXPECT_EQ(r.retransmitted(Segment::Backhaul), 0u) << "trial " << trial;
    EXPECT_EQ(r.first_tx(Segment::Backhaul), 300000u * relay);
  }
}

TEST(Transfer, UpstreamLossIsRecoveredBySource) {
  auto c = chain({{1e7, 0.001, 0.2, Segment::Backhaul}, {1e7, 0.001, 0.2, Segment::AccessDown}});
  const auto r = transfer(c.topo, make_session(c.topo, c.path, 300000, NodeIndex{1}), 2);
  EXPECT_GT(r.retransmitted(Segment::Backhaul), 0u);
  EXPECT_EQ(r.delivered_bytes, 300000u);
}

TEST(Transfer, PathologicalLossFailsSession) {
  auto c = chain({{1e7, 0.0, 0.97}});
  EXPECT_THROW(transfer(c.topo, make_session(c.topo, c.path, 150000), 1), aqua::SessionFailed);
}

TEST(Transfer, RejectsMalformedSessions) {
  auto c = chain({{1e7, 0.0}, {1e7, 0.0}});
  EXPECT_THROW(transfer(c.topo, make_session(c.topo, c.path, 0), 1), aqua::ConfigurationError);
  // The destination is not a valid retransmission endpoint.
  EXPECT_THROW(transfer(c.topo, make_session(c.topo, c.path, 10, NodeIndex{2}), 1),
               aqua::ConfigurationError);
  Topology other = c.topo;
  other.add_node("x", NodeKind::Device);
  EXPECT_THROW(transfer(other, make_session(other, c.path, 10, other.node_index("x")), 1),
               aqua::ConfigurationError);
  EXPECT_THROW(make_session(c.topo, Path{c.path[1], c.path[0]}, 10), aqua::ConfigurationError);
}

TEST(Transfer, SourcePacingSpreadsRelease) {
  auto c = chain({{1e9, 0.0}});
  auto s = make_session(c.topo, c.path, 15000);
  s.source_rate = 1.2e6;  // one 1500-byte packet every 10 ms
  const auto r = transfer(c.topo, s, 1);
  EXPECT_NEAR(r.duration(), 0.09 + 1500.0 * 8.0 / 1e9, 1e-12);
}

TEST(Transfer, InfiniteRateAddsNoSerialization) {
  const double inf = std::numeric_limits<double>::infinity();
  auto c = chain({{inf, 0.25}, {inf, 0.5}});
  EXPECT_EQ(transfer(c.topo, make_session(c.topo, c.path, 10000000), 1).duration(), 0.75);
}

// Completion time as a function of perturbed link parameters, with loss
// outcomes pinned by the keyed draws.
class Monotonicity : public ::testing::TestWithParam<int> {};

TEST_P(Monotonicity, FasterLinksNeverSlowDelivery) {
  std::mt19937_64 gen(static_cast<std::uint64_t>(GetParam()));
  std::uniform_real_distribution<double> rate(1e6, 1e8), lat(0.0, 0.01), loss(0.0, 0.2),
      factor(1.0, 4.0);
  std::uniform_int_distribution<std::uint64_t> bytes(1, 100000);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Link> links(1 + static_cast<std::size_t>(trial % 3));
    for (auto& l : links) l = Link{rate(gen), lat(gen), loss(gen)};
    const auto b = bytes(gen);
    const std::size_t k = static_cast<std::size_t>(trial) % links.size();
    auto base = chain(links);
    auto faster_links = links;
    faster_links[k].rate *= factor(gen);
    auto faster = chain(faster_links);
    const auto seed = static_cast<std::uint64_t>(trial);
    const double t0 = transfer(base.topo, make_session(base.topo, base.path, b), seed).duration();
    const double t1 = transfer(faster.topo, make_session(faster.topo, faster.path, b), seed).duration();
    EXPECT_LE(t1, t0 * (1.0 + 1e-12)) << "trial " << trial;
  }
}

TEST_P(Monotonicity, MoreLossNeverSpeedsDelivery) {
  std::mt19937_64 gen(static_cast<std::uint64_t>(GetParam()) + 1000);
  std::uniform_real_distribution<double> rate(1e6, 1e8), lat(0.0, 0.01), loss(0.0, 0.2),
      extra(0.0, 0.2);
  std::uniform_int_distribution<std::uint64_t> bytes(1, 100000);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Link> links(1 + static_cast<std::size_t>(trial % 3));
    for (auto& l : links) l = Link{rate(gen), lat(gen), loss(gen)};
    const auto b = bytes(gen);
    const std::size_t k = static_cast<std::size_t>(trial) % links.size();
    auto base = chain(links);
    auto lossier_links = links;
    lossier_links[k].loss_prob += extra(gen);
    auto lossier = chain(lossier_links);
    const auto seed = static_cast<std::uint64_t>(trial);
    const double t0 = transfer(base.topo, make_session(base.topo, base.path, b), seed).duration();
    const double t1 = transfer(lossier.topo, make_session(lossier.topo, lossier.path, b), seed).duration();
    EXPECT_GE(t1, t0 * (1.0 - 1e-12)) << "trial " << trial;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, Monotonicity, ::testing::Range(1, 6));

}  // namespace
