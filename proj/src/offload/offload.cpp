#include "aqua/offload/offload.hpp"

#include <algorithm>
#include <cmath>

#include "aqua/errors.hpp"

namespace aqua::offload {

void ComputeTask::validate() const {
  if (!std::isfinite(data_total) || !std::isfinite(data_cached) || !std::isfinite(instructions)) {
    throw DomainError("task parameters must be finite");
  }
  if (data_cached < 0.0 || data_cached > data_total) {
    throw DomainError("task needs 0 <= data_cached <= data_total");
  }
  if (instructions < 0.0) throw DomainError("task instructions must be >= 0");
}

double remote_time(const ComputeTask& task, double r, double f) {
  task.validate();
  if (!(r > 0.0)) throw DomainError("transfer rate r must be > 0");
  if (!(f > 0.0)) throw DomainError("compute speed f must be > 0");
  return task.uncached_bits() / r + task.instructions / f;
}

double local_time(const ComputeTask& task, const DeviceProfile& device) {
  task.validate();
  if (!(device.local_cpu > 0.0)) throw DomainError("device local_cpu must be > 0");
  return task.instructions / device.local_cpu;
}

OffloadDecision decide(const ComputeTask& task, const DeviceProfile& device, double r, double f) {
  OffloadDecision d;
  d.t_local = local_time(task, device);
  d.t_remote = remote_time(task, r, f);
  d.choice = d.t_remote < d.t_local ? Placement::Remote : Placement::Local;
  return d;
}

ComputeTask bind_cached_input(ComputeTask task, const clone::CacheLookup& lookup) {
  task.data_cached =
      lookup.hit ? std::min(task.data_total, static_cast<double>(lookup.size) * 8.0) : 0.0;
  return task;
}

std::uint64_t upload_bytes(const ComputeTask& task) {
  task.validate();
  return static_cast<std::uint64_t>(std::ceil(task.uncached_bits() / 8.0));
}

struct Offloader::Run {
  ComputeTask task;
  std::string user;
  clone::Tier tier;
  std::uint64_t instance;
  std::uint64_t result_size;
  net::Path downlink;
  Done done;
  OffloadResult result;
};

void Offloader::record(std::string_view key, std::uint64_t delta) {
  if (report_) report_->record(key, delta);
}

clone::Clone& Offloader::require(const Run& run, const char* step) {
  clone::Clone* c = clones_.find(run.user, run.tier);
  if (!c || c->instance != run.instance || c->state != clone::CloneState::Active) {
    throw OffloadFailed("clone of '" + run.user + "' is not active at " + step);
  }
  return *c;
}

namespace {
void accumulate(net::SegmentCounters& into, const net::SegmentCounters& from) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
}
}  // namespace

void Offloader::execute(const ComputeTask& task, const std::string& user, clone::Tier tier,
                        const net::Path& uplink, std::uint64_t result_size, Done done,
                        net::Path downlink) {
  task.validate();
  clone::Clone* c = clones_.find(user, tier);
  if (!c || c->state != clone::CloneState::Active) {
    throw OffloadFailed("clone of '" + user + "' is not active at submission");
  }
  auto& net = clones_.network();
  const auto& topo = net.topology();
  const auto site = topo.node_index(c->site);
  net::NodeIndex device = site;
  if (!uplink.empty()) {
    topo.check_contiguous(uplink);
    if (topo.link(uplink.back()).to != site) {
      throw ConfigurationError("offload uplink does not end at the clone's site");
    }
    device = topo.link(uplink.front()).from;
  }
  if (downlink.empty() && result_size > 0) downlink = topo.route(site, device);

  auto run = std::make_shared<Run>();
  run->task = task;
  run->user = user;
  run->tier = tier;
  run->instance = c->instance;
  run->result_size = result_size;
  run->downlink = std::move(downlink);
  run->done = std::move(done);
  run->result.start_time = net.simulator().now();
  record("count.offload.remote", 1);

  const std::uint64_t bytes = upload_bytes(task);
  if (bytes == 0) {
    compute(run);
    return;
  }
  if (uplink.empty()) {
    throw ConfigurationError("offload with uncached input needs an uplink path");
  }
  auto session = net::make_session(topo, uplink, bytes);
  net.start_transfer(session, [this, run](const net::TransferResult& r) {
    accumulate(run->result.first_tx_bytes, r.first_tx_bytes);
    accumulate(run->result.retransmit_bytes, r.retransmit_bytes);
    compute(run);
  });
}

void Offloader::compute(const std::shared_ptr<Run>& run) {
  auto& sim = clones_.network().simulator();
  clone::Clone& c = require(*run, "compute start");
  run->result.upload_done = sim.now();
  double duration = 0.0;
  if (run->task.instructions > 0.0) {
    if (!(c.cpu_capacity > 0.0)) {
      throw OffloadFailed("clone of '" + run->user + "' has no cpu capacity");
    }
    duration = run->task.instructions / c.cpu_capacity;
  }
  double& busy = busy_until_[run->instance];
  const double start = std::max(sim.now(), busy);
  busy = start + duration;
  sim.schedule(busy, [this, run] {
    require(*run, "compute end");
    run->result.compute_done = clones_.network().simulator().now();
    download(run);
  });
}

void Offloader::download(const std::shared_ptr<Run>& run) {
  auto& net = clones_.network();
  auto finish = [run](double at) {
    run->result.finish_time = at;
    if (run->done) run->done(run->result);
  };
  if (run->result_size == 0) {
    finish(net.simulator().now());
    return;
  }
  auto session = net::make_session(net.topology(), run->downlink, run->result_size);
  net.start_transfer(session, [run, finish](const net::TransferResult& r) {
    accumulate(run->result.first_tx_bytes, r.first_tx_bytes);
    accumulate(run->result.retransmit_bytes, r.retransmit_bytes);
    finish(r.completion_time);
  });
}

void Offloader::execute_local(const ComputeTask& task, const DeviceProfile& device, Done done) {
  const double duration = local_time(task, device);
  auto& sim = clones_.network().simulator();
  record("count.offload.local", 1);
  OffloadResult result;
  result.start_time = sim.now();
  sim.schedule_in(duration, [&sim, result, done = std::move(done)]() mutable {
    result.upload_done = result.start_time;
    result.compute_done = sim.now();
    result.finish_time = sim.now();
    if (done) done(result);
  });
}

}  // namespace aqua::offload
