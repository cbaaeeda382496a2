#include "aqua/controller/controller.hpp"

#include <cmath>

#include "aqua/errors.hpp"

namespace aqua::controller {

MobileCloudController::MobileCloudController(clone::CloneManager& clones, Capacity capacity)
    : clones_(clones), capacity_(capacity) {
  capacity_.validate();
}

void MobileCloudController::attach(const std::string& user, const offload::ComputeTask& task,
                                   net::LinkIndex access_up,
                                   std::optional<net::LinkIndex> access_down) {
  task.validate();
  const auto& topo = clones_.network().topology();
  if (access_up >= topo.link_count() || (access_down && *access_down >= topo.link_count())) {
    throw ConfigurationError("access link of '" + user + "' is not in the topology");
  }
  if (!users_.emplace(user, Attachment{task, access_up, access_down}).second) {
    throw ConfigurationError("user '" + user + "' is already attached");
  }
}

void MobileCloudController::update_task(const std::string& user, const offload::ComputeTask& task) {
  task.validate();
  auto it = users_.find(user);
  if (it == users_.end()) throw ConfigurationError("user '" + user + "' is not attached");
  it->second.task = task;
}

MonitoringSnapshot MobileCloudController::snapshot() const {
  MonitoringSnapshot snap;
  auto& net = clones_.network();
  snap.timestamp = net.simulator().now();
  const auto& topo = net.topology();
  for (const auto& [name, a] : users_) {
    UserSnapshot u;
    u.user = name;
    u.task = a.task;
    u.access.up = a.up;
    u.access.down = a.down;
    u.access.rate = topo.link(a.up).params.rate;
    u.access.loss_prob = topo.link(a.up).params.loss_prob;
    if (const auto* c = clones_.find(name, clone::Tier::Transient);
        c && c->state == clone::CloneState::Active) {
      u.clone_cpu = c->cpu_capacity;
      u.site = c->site;
    }
    snap.users.push_back(std::move(u));
  }
  for (const auto& s : clones_.site_names()) {
    const auto& site = clones_.site(s);
    const auto use = clones_.usage(s);
    snap.sites.push_back({s, site.cpu_pool, use.cpu_allocated, use.slots_used, site.slot_capacity});
  }
  return snap;
}

AllocationPlan MobileCloudController::plan(const MonitoringSnapshot& snap, Objective objective,
                                           Method method, int grid_steps) const {
  std::vector<offload::ComputeTask> tasks;
  for (const auto& u : snap.users) tasks.push_back(u.task);
  AllocationPlan p = method == Method::Heuristic
                         ? allocate_heuristic(tasks, capacity_, objective)
                         : allocate_bruteforce(tasks, capacity_, objective, grid_steps);
  for (std::size_t i = 0; i < snap.users.size(); ++i) p.users[i].user = snap.users[i].user;
  return p;
}

void MobileCloudController::apply_plan(const AllocationPlan& plan) {
  double radio = 0.0, cloud = 0.0;
  std::map<std::string, double> site_delta;
  for (const auto& u : plan.users) {
    if (!users_.contains(u.user)) throw PlanRejected("plan names unknown user '" + u.user + "'");
    if (!std::isfinite(u.rate) || u.rate < 0.0 || !std::isfinite(u.cpu) || u.cpu < 0.0) {
      throw PlanRejected("plan entry for '" + u.user + "' is not a finite non-negative rate");
    }
    radio += u.rate;
    cloud += u.cpu;
    if (u.cpu > 0.0) {
      const auto* c = clones_.find(u.user, clone::Tier::Transient);
      if (!c || c->state != clone::CloneState::Active) {
        throw PlanRejected("user '" + u.user + "' has no active transient clone to resize");
      }
      site_delta[c->site] += u.cpu - c->cpu_capacity;
    }
  }
  if (radio > capacity_.radio_total) throw PlanRejected("plan exceeds radio_total");
  if (cloud > capacity_.cloud_total) throw PlanRejected("plan exceeds cloud_total");
  for (const auto& [site, delta] : site_delta) {
    if (clones_.usage(site).cpu_allocated + delta > clones_.site(site).cpu_pool) {
      throw PlanRejected("plan exceeds the cpu pool of site '" + site + "'");
    }
  }

  auto& net = clones_.network();
  for (const auto& u : plan.users) {
    if (u.rate <= 0.0) continue;
    const auto& a = users_.at(u.user);
    net.set_link_rate(a.up, u.rate);
    if (a.down) net.set_link_rate(*a.down, u.rate);
  }
  // Shrink first so no intermediate state overshoots a pool.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& u : plan.users) {
      if (u.cpu <= 0.0) continue;
      const double current = clones_.find(u.user, clone::Tier::Transient)->cpu_capacity;
      if ((pass == 0) == (u.cpu <= current)) {
        clones_.set_cpu_capacity(u.user, clone::Tier::Transient, u.cpu);
      }
    }
  }
}

}  // namespace aqua::controller
