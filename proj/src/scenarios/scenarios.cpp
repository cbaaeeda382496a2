#include "aqua/scenarios/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "aqua/errors.hpp"
#include "aqua/sim/simulator.hpp"

namespace aqua::scenarios {
namespace {

using net::Segment;

std::uint64_t sum(const net::SegmentCounters& c) {
  std::uint64_t s = 0;
  for (auto v : c) s += v;
  return s;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigurationError(what);
}

std::string device_name(std::size_t i) { return "ue" + std::to_string(i); }

std::string input_item(const std::string& user) { return "input:" + user; }

}  // namespace

// ---- c2c -------------------------------------------------------------------

std::string_view c2c_variant_name(C2CVariant v) noexcept {
  switch (v) {
    case C2CVariant::S1_OneToOne: return "S1_OneToOne";
    case C2CVariant::S2_FanOutViaClones: return "S2_FanOutViaClones";
    case C2CVariant::S3_DirectFromSenderClone: return "S3_DirectFromSenderClone";
    case C2CVariant::D2D_Baseline: return "D2D_Baseline";
  }
  return "?";
}

C2CVariant parse_c2c_variant(std::string_view name) {
  for (auto v : {C2CVariant::S1_OneToOne, C2CVariant::S2_FanOutViaClones,
                 C2CVariant::S3_DirectFromSenderClone, C2CVariant::D2D_Baseline}) {
    if (name == c2c_variant_name(v)) return v;
  }
  throw ConfigurationError("unknown c2c variant '" + std::string(name) + "'");
}

void C2CScenarioSpec::validate() const {
  require(n_receivers >= 1, "c2c.n_receivers: must be >= 1");
  require(repeat_requests >= 1, "c2c.repeat_requests: must be >= 1");
  require(content.size > 0, "c2c.content.size: must be > 0");
  require(!content.id.empty(), "c2c.content.id: must not be empty");
  require(variant != C2CVariant::S1_OneToOne || n_receivers == 1,
          "c2c.n_receivers: S1_OneToOne requires exactly 1 receiver");
}

C2COutcome run_c2c(const C2CScenarioSpec& spec, const TopologyParams& topo_params,
                   const CloneParams& clone_params, std::uint64_t seed) {
  spec.validate();
  TopologyParams params = topo_params;
  if (spec.distinct_sites) params.second_site = true;

  const std::string tx = "tx";
  const std::size_t total = spec.n_receivers * spec.repeat_requests;
  std::vector<std::string> users{tx};
  for (std::size_t j = 0; j < total; ++j) users.push_back("rx" + std::to_string(j));

  C2COutcome out;
  out.report = metrics::MetricsReport("c2c." + std::string(c2c_variant_name(spec.variant)), seed);
  out.receiver_downlink.assign(total, 0);

  sim::Simulator sim(seed);
  net::Network net(sim, build_cran(params, users), &out.report);
  clone::CloneManager clones(net, kCentral, &out.report);
  add_edge_sites(clones, net.topology(), clone_params);
  const auto& topo = net.topology();

  const bool via_clones = spec.variant != C2CVariant::D2D_Baseline;
  const std::string tx_site = kEdge;
  const std::string rx_site = spec.distinct_sites ? kEdge2 : kEdge;
  if (via_clones && spec.content.size > clone_params.storage_capacity) {
    throw ItemTooLarge("content '" + spec.content.id + "' (" + std::to_string(spec.content.size) +
                       " bytes) exceeds the sender clone's storage");
  }

  auto send = [&](const net::Path& path, std::function<void(const net::TransferResult&)> done) {
    auto s = net::make_session(topo, path, spec.content.size);
    s.mtu_payload = params.mtu;
    net.start_transfer(s, std::move(done));
  };

  auto downlink = [&](std::size_t j, const std::string& from, std::function<void()> done) {
    send(topo.route(from, users[j + 1]), [&out, j, done](const net::TransferResult& r) {
      out.receiver_downlink[j] += r.first_tx(Segment::AccessDown);
      out.sender_uplink += r.first_tx(Segment::AccessUp);
      done();
    });
  };

  auto deliver = [&](std::size_t j, std::function<void()> done) {
    const std::string& rx = users[j + 1];
    switch (spec.variant) {
      case C2CVariant::D2D_Baseline:
        downlink(j, tx, done);
        break;
      case C2CVariant::S3_DirectFromSenderClone:
        downlink(j, tx_site, done);
        break;
      case C2CVariant::S1_OneToOne:
      case C2CVariant::S2_FanOutViaClones: {
        const auto path = tx_site == rx_site ? intra_site_path(topo, tx_site)
                                             : topo.route(tx_site, rx_site);
        send(path, [&, j, rx, done](const net::TransferResult& r) {
          out.inter_clone += sum(r.first_tx_bytes);
          clones.cache_put(rx, clone::Tier::Transient, spec.content);
          downlink(j, rx_site, done);
        });
        break;
      }
    }
  };

  // Sender-side cache check; uploads only on a miss.
  auto ensure_uploaded = [&](std::function<void()> then) {
    if (!via_clones) {
      then();
      return;
    }
    if (clones.cache_get(tx, clone::Tier::Transient, spec.content.id).hit) {
      then();
      return;
    }
    send(topo.route(tx, tx_site), [&, then](const net::TransferResult& r) {
      out.sender_uplink += r.first_tx(Segment::AccessUp);
      clones.cache_put(tx, clone::Tier::Transient, spec.content);
      then();
    });
  };

  std::size_t pending = 0;
  std::function<void(std::size_t)> round = [&](std::size_t r) {
    if (r == spec.repeat_requests) return;
    ensure_uploaded([&, r] {
      pending = spec.n_receivers;
      for (std::size_t i = 0; i < spec.n_receivers; ++i) {
        deliver(r * spec.n_receivers + i, [&, r] {
          if (--pending == 0) round(r + 1);
        });
      }
    });
  };

  if (via_clones) {
    std::size_t waiting = users.size();
    for (const auto& u : users) {
      clones.create_persistent(u, clone_params.storage_capacity);
      const bool is_tx = u == tx;
      clones.spawn(u, is_tx ? tx_site : rx_site,
                   {0, clone_params.cpu_capacity, clone_params.storage_capacity},
                   [&](clone::Clone&) {
                     if (--waiting == 0) round(0);
                   });
    }
  } else {
    sim.schedule(0.0, [&] { round(0); }, "c2c:start");
  }
  sim.run();
  return out;
}

// ---- streaming -------------------------------------------------------------

void StreamingSpec::validate() const {
  require(std::isfinite(bitrate) && bitrate > 0.0, "streaming.bitrate: must be > 0");
  require(std::isfinite(duration) && duration > 0.0, "streaming.duration: must be > 0");
  require(wireless_loss >= 0.0 && wireless_loss < 1.0,
          "streaming.wireless_loss: must be in [0, 1)");
  require(packet_payload > 0, "streaming.packet_payload: must be > 0");
  require(total_bytes() > 0, "streaming: bitrate x duration is below one byte");
}

std::uint64_t StreamingSpec::total_bytes() const {
  return static_cast<std::uint64_t>(std::llround(bitrate * duration / 8.0));
}

metrics::MetricsReport run_streaming(const StreamingSpec& spec, const TopologyParams& topo_params,
                                     std::uint64_t seed) {
  spec.validate();
  const std::string ue = device_name(0);
  const std::vector<std::string> devices{ue};
  net::Topology topo = build_cran(topo_params, devices);
  const auto down = *topo.find_link(topo.node_index(kBaseStation), topo.node_index(ue));
  topo.link(down).params.loss_prob = spec.wireless_loss;

  metrics::MetricsReport report(spec.with_clone ? "streaming.clone" : "streaming.no_clone", seed);
  sim::Simulator sim(seed);
  net::Network net(sim, std::move(topo), &report);
  const auto& t = net.topology();

  const auto relay = t.node_index(spec.with_clone ? kEdge : kServer);
  auto session = net::make_session(t, t.route(kServer, ue), spec.total_bytes(), relay);
  session.mtu_payload = spec.packet_payload;
  session.source_rate = spec.bitrate;
  double completion = 0.0;
  net.start_transfer(session, [&](const net::TransferResult& r) { completion = r.duration(); });
  sim.run();
  // Both retransmission counters are always reported, zero or not.
  report.record(net::bytes_key(Segment::Backhaul, true), 0u);
  report.record(net::bytes_key(Segment::AccessDown, true), 0u);
  report.set("time.stream.completion", completion);
  return report;
}

// ---- mptcp -----------------------------------------------------------------

void MptcpSpec::validate() const {
  require(!access_paths.empty(), "mptcp.access_paths: needs at least one path");
  for (std::size_t i = 0; i < access_paths.size(); ++i) {
    const auto& l = access_paths[i];
    require(std::isfinite(l.rate) && l.rate > 0.0,
            "mptcp.access_paths[" + std::to_string(i) + "].rate: must be finite and > 0");
    require(std::isfinite(l.latency) && l.latency >= 0.0,
            "mptcp.access_paths[" + std::to_string(i) + "].latency: must be >= 0");
  }
  require(std::isfinite(clone_to_server.rate) && clone_to_server.rate > 0.0,
          "mptcp.clone_to_server.rate: must be finite and > 0");
  require(std::isfinite(clone_to_server.latency) && clone_to_server.latency >= 0.0,
          "mptcp.clone_to_server.latency: must be >= 0");
}

MptcpResult run_mptcp_proxy(const MptcpSpec& spec, std::uint64_t bytes) {
  spec.validate();
  double aggregate = 0.0;
  double access_latency = 0.0;
  for (const auto& l : spec.access_paths) {
    aggregate += l.rate;
    access_latency = std::max(access_latency, l.latency);
  }
  MptcpResult r;
  r.throughput = std::min(aggregate, spec.clone_to_server.rate);
  r.completion = static_cast<double>(bytes) * 8.0 / r.throughput + spec.clone_to_server.latency +
                 access_latency;
  return r;
}

metrics::MetricsReport mptcp_report(const MptcpSpec& spec, std::uint64_t bytes, std::uint64_t seed) {
  const auto r = run_mptcp_proxy(spec, bytes);
  metrics::MetricsReport report("mptcp", seed);
  report.record("bytes.backhaul.first_tx", bytes);
  report.record("bytes.access_down.first_tx", bytes);
  report.set("time.stream.completion", r.completion);
  report.set_metadata("mptcp.throughput", metrics::format_real(r.throughput));
  return report;
}

// ---- abr -------------------------------------------------------------------

void AbrLadder::validate() const {
  require(!bitrates.empty(), "abr.ladder: must not be empty");
  for (std::size_t i = 0; i < bitrates.size(); ++i) {
    require(std::isfinite(bitrates[i]) && bitrates[i] > 0.0, "abr.ladder: rungs must be > 0");
    require(i == 0 || bitrates[i] > bitrates[i - 1], "abr.ladder: must be strictly increasing");
  }
  require(safety_factor > 0.0 && safety_factor <= 1.0, "abr.safety_factor: must be in (0, 1]");
}

double run_abr_offload(const AbrLadder& ladder, double measured_rate) {
  ladder.validate();
  const double budget = ladder.safety_factor * measured_rate;
  double chosen = ladder.bitrates.front();
  for (double rung : ladder.bitrates) {
    if (rung <= budget) chosen = rung;
  }
  return chosen;
}

void AbrSpec::validate() const {
  ladder.validate();
  require(!measured_rates.empty(), "abr.measured_rates: must not be empty");
  for (double r : measured_rates) {
    require(r > 0.0 && !std::isnan(r), "abr.measured_rates: rates must be > 0");
  }
  require(std::isfinite(epoch) && epoch > 0.0, "abr.epoch: must be > 0");
}

AbrOutcome run_abr(const AbrSpec& spec, const TopologyParams& topo_params,
                   const CloneParams& clone_params, std::uint64_t seed) {
  spec.validate();
  const std::string ue = device_name(0);
  const std::vector<std::string> devices{ue};
  AbrOutcome out;
  out.report = metrics::MetricsReport("abr", seed);
  sim::Simulator sim(seed);
  net::Network net(sim, build_cran(topo_params, devices), &out.report);
  clone::CloneManager clones(net, kCentral, &out.report);
  add_edge_sites(clones, net.topology(), clone_params);
  const auto down =
      *net.topology().find_link(net.topology().node_index(kBaseStation), net.topology().node_index(ue));

  clones.create_persistent(ue, clone_params.storage_capacity);
  clones.spawn(ue, kEdge,
               {clone_params.profile_size, clone_params.cpu_capacity, clone_params.storage_capacity},
               [&](clone::Clone&) {
                 for (std::size_t k = 0; k < spec.measured_rates.size(); ++k) {
                   const double at = sim.now() + static_cast<double>(k) * spec.epoch;
                   const double rate = spec.measured_rates[k];
                   sim.schedule(at, [&net, down, rate] { net.set_link_rate(down, rate); },
                                "bs:" + ue + ":rate");
                   sim.schedule(
                       at,
                       [&, ue] {
                         clones.active(ue, clone::Tier::Transient);
                         const double measured = net.topology().link(down).params.rate;
                         out.chosen.push_back(run_abr_offload(spec.ladder, measured));
                         out.report.record("count.offload.remote", 1);
                       },
                       "clone:" + ue + ":abr");
                 }
               });
  sim.run();
  return out;
}

// ---- offload ---------------------------------------------------------------

void TaskParams::validate() const {
  require(std::isfinite(data_total) && data_total >= 0.0, "task.D: must be finite and >= 0");
  require(std::isfinite(data_cached) && data_cached >= 0.0 && data_cached <= data_total,
          "task.S: must satisfy 0 <= S <= D");
  require(std::isfinite(instructions) && instructions >= 0.0, "task.F: must be finite and >= 0");
  require(std::isfinite(local_cpu) && local_cpu > 0.0, "task.local_cpu: must be > 0");
}

OffloadPolicy parse_offload_policy(std::string_view name) {
  if (name == "decide") return OffloadPolicy::Decide;
  if (name == "remote") return OffloadPolicy::Remote;
  if (name == "local") return OffloadPolicy::Local;
  throw ConfigurationError("offload.policy: expected decide, remote or local, got '" +
                           std::string(name) + "'");
}

void OffloadSpec::validate() const {
  require(users >= 1, "offload.users: must be >= 1");
  require(tasks.size() == 1 || tasks.size() == users,
          "task: give one task or one per user");
  for (const auto& t : tasks) t.validate();
  if (allocation) {
    allocation->capacity.validate();
    require(allocation->grid_steps >= 2, "allocation.grid_steps: must be >= 2");
  }
}

const TaskParams& OffloadSpec::task_for(std::size_t user) const {
  return tasks.size() == 1 ? tasks.front() : tasks.at(user);
}

OffloadOutcome run_offload(const OffloadSpec& spec, const TopologyParams& topo_params,
                           const CloneParams& clone_params, std::uint64_t seed) {
  spec.validate();
  std::vector<std::string> devices;
  for (std::size_t i = 0; i < spec.users; ++i) devices.push_back(device_name(i));

  OffloadOutcome out;
  out.report = metrics::MetricsReport("offload", seed);
  sim::Simulator sim(seed);
  net::Network net(sim, build_cran(topo_params, devices), &out.report);
  clone::CloneManager clones(net, kCentral, &out.report);
  add_edge_sites(clones, net.topology(), clone_params);
  offload::Offloader offloader(clones, &out.report);
  const auto& topo = net.topology();
  const auto bs = topo.node_index(kBaseStation);

  std::optional<controller::MobileCloudController> ctl;
  if (spec.allocation) ctl.emplace(clones, spec.allocation->capacity);

  double latest = 0.0;
  auto release = [&] {
    out.release_time = sim.now();
    std::vector<offload::ComputeTask> tasks;
    for (std::size_t i = 0; i < spec.users; ++i) {
      const auto lookup = clones.cache_get(devices[i], clone::Tier::Transient, input_item(devices[i]));
      tasks.push_back(offload::bind_cached_input(spec.task_for(i).task(), lookup));
    }
    if (ctl) {
      for (std::size_t i = 0; i < spec.users; ++i) {
        const auto ue = topo.node_index(devices[i]);
        ctl->attach(devices[i], tasks[i], *topo.find_link(ue, bs), topo.find_link(bs, ue));
      }
      const auto& a = *spec.allocation;
      out.plan = ctl->plan(ctl->snapshot(), a.objective, a.method, a.grid_steps);
      ctl->apply_plan(*out.plan);
    }
    out.users.resize(spec.users);
    for (std::size_t i = 0; i < spec.users; ++i) {
      const auto& u = devices[i];
      const auto& params = spec.task_for(i);
      const auto ue = topo.node_index(u);
      const auto up = *topo.find_link(ue, bs);
      auto& rec = out.users[i];
      rec.user = u;
      rec.rate = topo.link(up).params.rate;
      rec.cpu = clones.active(u, clone::Tier::Transient).cpu_capacity;
      const offload::DeviceProfile device{params.local_cpu, up};
      switch (spec.policy) {
        case OffloadPolicy::Decide:
          rec.decision = offload::decide(tasks[i], device, rec.rate, rec.cpu);
          break;
        case OffloadPolicy::Remote:
          rec.decision = {offload::Placement::Remote, offload::local_time(tasks[i], device),
                          offload::remote_time(tasks[i], rec.rate, rec.cpu)};
          break;
        case OffloadPolicy::Local:
          rec.decision = {offload::Placement::Local, offload::local_time(tasks[i], device),
                          offload::remote_time(tasks[i], rec.rate, rec.cpu)};
          break;
      }
      auto done = [&, i](const offload::OffloadResult& r) {
        out.users[i].duration = r.finish_time - out.release_time;
        latest = std::max(latest, out.users[i].duration);
      };
      if (rec.decision.choice == offload::Placement::Remote) {
        offloader.execute(tasks[i], u, clone::Tier::Transient, topo.route(u, kEdge),
                          params.result_size, done);
      } else {
        offloader.execute_local(tasks[i], device, done);
      }
    }
  };

  std::size_t waiting = spec.users;
  for (std::size_t i = 0; i < spec.users; ++i) {
    const auto& u = devices[i];
    clones.create_persistent(u, clone_params.storage_capacity);
    const auto cached_bytes =
        static_cast<std::uint64_t>(std::ceil(spec.task_for(i).data_cached / 8.0));
    clones.spawn(u, kEdge,
                 {clone_params.profile_size, clone_params.cpu_capacity,
                  clone_params.storage_capacity},
                 [&, u, cached_bytes](clone::Clone&) {
                   if (cached_bytes > 0) {
                     clones.cache_put(u, clone::Tier::Transient, {input_item(u), cached_bytes});
                   }
                   if (--waiting == 0) release();
                 });
  }
  sim.run();
  out.report.set("time.task.finish", latest);
  return out;
}

}  // namespace aqua::scenarios
