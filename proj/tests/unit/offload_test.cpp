#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aqua/errors.hpp"
#include "aqua/offload/offload.hpp"

namespace {

using namespace aqua::offload;
using aqua::clone::Tier;

TEST(RemoteTime, HandExample) {
  EXPECT_DOUBLE_EQ(remote_time({8e6, 0.0, 4e9}, 1e6, 2e9), 10.0);
}

TEST(RemoteTime, FullyCachedInputLeavesComputeOnly) {
  EXPECT_DOUBLE_EQ(remote_time({8e6, 8e6, 3e9}, 1e6, 1e9), 3.0);
  EXPECT_EQ(remote_time({8e6, 8e6, 0.0}, 1e6, 1e9), 0.0);
}

TEST(RemoteTime, RejectsNonPositiveResources) {
  EXPECT_THROW(remote_time({1, 0, 1}, 0.0, 1.0), aqua::DomainError);
  EXPECT_THROW(remote_time({1, 0, 1}, 1.0, -1.0), aqua::DomainError);
  EXPECT_THROW(remote_time({1, 2, 1}, 1.0, 1.0), aqua::DomainError);
}

TEST(RemoteTime, MonotoneProperties) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(1.0, 1e9), grow(1.01, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const double D = u(gen), F = u(gen), r = u(gen), f = u(gen);
    const double S = D * std::uniform_real_distribution<double>(0.0, 0.9)(gen);
    const ComputeTask t{D, S, F};
    EXPECT_LT(remote_time(t, r * grow(gen), f), remote_time(t, r, f));
    EXPECT_LT(remote_time(t, r, f * grow(gen)), remote_time(t, r, f));
    const ComputeTask cached{D, D, F};
    EXPECT_EQ(remote_time(cached, r, f), remote_time(cached, r * grow(gen), f));
  }
}

TEST(LocalTime, Examples) {
  EXPECT_DOUBLE_EQ(local_time({0, 0, 4e9}, {4e8, {}}), 10.0);
  EXPECT_EQ(local_time({0, 0, 0}, {4e8, {}}), 0.0);
  EXPECT_DOUBLE_EQ(local_time({0, 0, 4e9}, {8e8, {}}), 5.0);
}

TEST(Decide, TieRunsLocally) {
  // t_remote = 8 + 2 = 10 s, t_local = 4e9 / 4e8 = 10 s.
  const auto d = decide({8e6, 0.0, 4e9}, {4e8, {}}, 1e6, 2e9);
  EXPECT_EQ(d.t_remote, 10.0);
  EXPECT_EQ(d.t_local, 10.0);
  EXPECT_EQ(d.choice, Placement::Local);
}

TEST(Decide, FastNetworkAndCloneWin) {
  EXPECT_EQ(decide({8e6, 0.0, 4e9}, {1e9, {}}, 1e12, 2e9).choice, Placement::Remote);
}

TEST(Decide, SlowLinkStaysLocal) {
  const auto d = decide({1e6, 0.0, 1e9}, {1e9, {}}, 1.0, 1e10);
  EXPECT_GT(d.t_remote, d.t_local);
  EXPECT_EQ(d.choice, Placement::Local);
}

TEST(Decide, InvariantUnderCommonScaling) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(1.0, 1e6), c(0.01, 100.0);
  for (int i = 0; i < 5000; ++i) {
    const ComputeTask t{u(gen) * 8, 0.0, u(gen) * 1e3};
    const double r = u(gen), f = u(gen) * 1e3, local = u(gen) * 1e3;
    const double k = c(gen);
    // Scaling D, F by k keeps both times proportional to k.
    const auto a = decide(t, {local, {}}, r, f);
    const auto b = decide({t.data_total * k, 0.0, t.instructions * k}, {local, {}}, r, f);
    if (std::abs(a.t_remote - a.t_local) > 1e-9 * a.t_local) {
      EXPECT_EQ(a.choice, b.choice);
    }
  }
}

TEST(UploadBytes, RoundsUpToWholeBytes) {
  EXPECT_EQ(upload_bytes({8e6, 0.0, 0.0}), 1000000u);
  EXPECT_EQ(upload_bytes({9.0, 0.0, 0.0}), 2u);
  EXPECT_EQ(upload_bytes({8e6, 8e6, 0.0}), 0u);
}

TEST(BindCachedInput, UsesItemSizeInBits) {
  const ComputeTask t{8e6, 0.0, 1e9};
  EXPECT_EQ(bind_cached_input(t, {true, 250000}).data_cached, 2e6);
  EXPECT_EQ(bind_cached_input(t, {false, 0}).data_cached, 0.0);
  EXPECT_EQ(bind_cached_input(t, {true, 5000000}).data_cached, 8e6);
}

struct Rig {
  explicit Rig(double r, double f, double latency = 0.0, double loss = 0.0,
               std::uint64_t seed = 1)
      : sim(seed), net(sim, topology(r, latency, loss), &report), clones(net, "central", &report),
        offloader(clones, &report) {
    clones.add_site({"edge", 4, 1e12});
    clones.create_persistent("ue", 1000000);
    clones.spawn("ue", "edge", {0, f, 1000000});
    sim.run();
    up = net.topology().route("ue", "edge");
  }

  static aqua::net::Topology topology(double r, double latency, double loss) {
    using namespace aqua::net;
    Topology t;
    t.add_node("ue", NodeKind::Device);
    t.add_node("edge", NodeKind::EdgeCloudSite);
    t.add_node("central", NodeKind::CentralCloud);
    t.add_duplex("ue", "edge", Link{r, latency, loss, Segment::AccessUp});
    t.add_duplex("central", "edge", Link{1e9, 0.0, 0.0, Segment::Backhaul});
    return t;
  }

  OffloadResult run(const ComputeTask& task, std::uint64_t result_size = 0) {
    OffloadResult out;
    const double t0 = sim.now();
    offloader.execute(task, "ue", Tier::Transient, up, result_size,
                      [&](const OffloadResult& r) { out = r; });
    sim.run();
    EXPECT_EQ(out.start_time, t0);
    return out;
  }

  aqua::metrics::MetricsReport report{"offload", 1};
  aqua::sim::Simulator sim;
  aqua::net::Network net;
  aqua::clone::CloneManager clones;
  Offloader offloader;
  aqua::net::Path up;
};

TEST(Execute, MatchesRemoteTimeOnIdealPath) {
  Rig rig(1e6, 2e9);
  const ComputeTask t{8e6, 0.0, 4e9};
  const auto r = rig.run(t);
  EXPECT_NEAR(r.duration(), remote_time(t, 1e6, 2e9), 1e-12 * 10.0);
  EXPECT_NEAR(r.upload_done - r.start_time, 8.0, 1e-12);
  EXPECT_EQ(rig.report.count("count.offload.remote"), 1u);
  EXPECT_EQ(rig.report.count("bytes.access_up.first_tx"), 1000000u);
}

TEST(Execute, CachedInputSkipsUpload) {
  Rig rig(1e6, 1e9);
  const auto r = rig.run({8e6, 8e6, 3e9});
  EXPECT_DOUBLE_EQ(r.duration(), 3.0);
  EXPECT_EQ(rig.report.count("bytes.access_up.first_tx"), 0u);
}

TEST(Execute, LatencyAndResultOnlyAddTime) {
  Rig rig(1e6, 2e9, 0.01);
  const ComputeTask t{8e6, 0.0, 4e9};
  const auto r = rig.run(t, 3000);
  // Uplink latency, then 3000 B back at 1 Mb/s plus latency.
  EXPECT_NEAR(r.duration(), 10.0 + 0.01 + 0.024 + 0.01, 1e-9);
  EXPECT_EQ(rig.report.count("bytes.access_down.first_tx"), 3000u);
}

TEST(Execute, LossyUplinkIsStrictlySlower) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rig rig(1e6, 2e9, 0.0, 0.1, seed);
    const ComputeTask t{8e6, 0.0, 4e9};
    const auto r = rig.run(t);
    ASSERT_GT(rig.report.count("bytes.access_up.retransmit"), 0u);
    EXPECT_GT(r.duration(), remote_time(t, 1e6, 2e9));
  }
}

TEST(Execute, TasksQueueOnOneClone) {
  Rig rig(1e9, 1e9);
  std::vector<double> finish;
  for (int i = 0; i < 3; ++i) {
    rig.offloader.execute({0, 0, 1e9}, "ue", Tier::Transient, rig.up, 0,
                          [&](const OffloadResult& r) { finish.push_back(r.finish_time); });
  }
  const double t0 = rig.sim.now();
  rig.sim.run();
  ASSERT_EQ(finish.size(), 3u);
  EXPECT_DOUBLE_EQ(finish[0] - t0, 1.0);
  EXPECT_DOUBLE_EQ(finish[2] - t0, 3.0);
}

TEST(Execute, DestroyedCloneFailsTheOffload) {
  Rig rig(1e6, 2e9);
  rig.offloader.execute({8e6, 0.0, 4e9}, "ue", Tier::Transient, rig.up, 0, {});
  rig.sim.schedule_in(1.0, [&] { rig.clones.destroy("ue"); });
  EXPECT_THROW(rig.sim.run(), aqua::OffloadFailed);
}

TEST(Execute, InactiveCloneRejectedUpFront) {
  Rig rig(1e6, 2e9);
  rig.clones.destroy("ue");
  EXPECT_THROW(rig.offloader.execute({8e6, 0.0, 4e9}, "ue", Tier::Transient, rig.up, 0, {}),
               aqua::OffloadFailed);
}

TEST(Execute, CacheBoundEstimateMatchesSimulation) {
  Rig rig(1e6, 2e9);
  rig.clones.cache_put("ue", Tier::Transient, {"input", 250000});
  const auto lookup = rig.clones.cache_get("ue", Tier::Transient, "input");
  const auto task = bind_cached_input({8e6, 0.0, 4e9}, lookup);
  EXPECT_EQ(task.data_cached, 2e6);
  const auto r = rig.run(task);
  EXPECT_NEAR(r.duration(), remote_time(task, 1e6, 2e9), 1e-12 * 8.0);
}

TEST(ExecuteLocal, TakesLocalTime) {
  Rig rig(1e6, 2e9);
  double d = -1.0;
  rig.offloader.execute_local({0, 0, 4e9}, {4e8, {}}, [&](const OffloadResult& r) { d = r.duration(); });
  rig.sim.run();
  EXPECT_DOUBLE_EQ(d, 10.0);
  EXPECT_EQ(rig.report.count("count.offload.local"), 1u);
}

}  // namespace
