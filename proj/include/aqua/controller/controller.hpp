#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aqua/clone/clone_manager.hpp"
#include "aqua/controller/allocation.hpp"
#include "aqua/offload/offload.hpp"

namespace aqua::controller {

struct AccessLinkState {
  net::LinkIndex up = 0;
  std::optional<net::LinkIndex> down;
  double rate = 0.0;  // current uplink rate
  double loss_prob = 0.0;
};

struct UserSnapshot {
  std::string user;
  offload::ComputeTask task;
  AccessLinkState access;
  double clone_cpu = 0.0;  // 0 when the user has no Active transient clone
  std::string site;
};

struct SiteSnapshot {
  std::string site;
  double cpu_pool = 0.0;
  double cpu_allocated = 0.0;
  std::size_t slots_used = 0;
  std::size_t slot_capacity = 0;
};

struct MonitoringSnapshot {
  sim::SimTime timestamp = 0.0;
  std::vector<UserSnapshot> users;  // sorted by user name
  std::vector<SiteSnapshot> sites;
};

enum class Method { Heuristic, BruteForce };

/// Collects monitoring data for attached users and pushes allocations back
/// into the running network (access-link rates) and clones (cpu capacity).
class MobileCloudController {
 public:
  MobileCloudController(clone::CloneManager& clones, Capacity capacity);

  void attach(const std::string& user, const offload::ComputeTask& task, net::LinkIndex access_up,
              std::optional<net::LinkIndex> access_down = std::nullopt);
  void update_task(const std::string& user, const offload::ComputeTask& task);

  MonitoringSnapshot snapshot() const;

  /// Allocation for the users in `snap`; plan entries carry user names.
  AllocationPlan plan(const MonitoringSnapshot& snap, Objective objective,
                      Method method = Method::Heuristic, int grid_steps = 200) const;

  /// Sets each listed user's access rate (both directions when a downlink is
  /// attached) and transient-clone cpu capacity. A zero entry leaves that
  /// resource untouched. Throws PlanRejected without changing anything when
  /// the plan exceeds the controller capacities or any site's cpu pool.
  void apply_plan(const AllocationPlan& plan);

  const Capacity& capacity() const noexcept { return capacity_; }

 private:
  struct Attachment {
    offload::ComputeTask task;
    net::LinkIndex up;
    std::optional<net::LinkIndex> down;
  };

  clone::CloneManager& clones_;
  Capacity capacity_;
  std::map<std::string, Attachment> users_;
};

}  // namespace aqua::controller
