#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aqua/controller/controller.hpp"
#include "aqua/metrics/report.hpp"
#include "aqua/offload/offload.hpp"
#include "aqua/scenarios/cran.hpp"

namespace aqua::scenarios {

// ---- clone-to-clone sharing ------------------------------------------------

enum class C2CVariant { S1_OneToOne, S2_FanOutViaClones, S3_DirectFromSenderClone, D2D_Baseline };

std::string_view c2c_variant_name(C2CVariant v) noexcept;
C2CVariant parse_c2c_variant(std::string_view name);

struct C2CScenarioSpec {
  C2CVariant variant = C2CVariant::S2_FanOutViaClones;
  std::size_t n_receivers = 1;
  clone::ContentItem content{"content", 1000000};
  std::size_t repeat_requests = 1;
  /// Receiver clones at "edge2" instead of next to the sender's clone.
  bool distinct_sites = false;

  void validate() const;
};

struct C2COutcome {
  metrics::MetricsReport report;
  std::uint64_t sender_uplink = 0;       // sender AccessUp bytes
  std::uint64_t inter_clone = 0;         // clone-to-clone bytes
  std::vector<std::uint64_t> receiver_downlink;  // AccessDown bytes per receiver
};

/// One sender ("tx") shares `content` with n_receivers x repeat_requests
/// distinct receivers ("rx0", "rx1", ...), served in repeat_requests rounds
/// of n_receivers concurrent deliveries. The sender uploads to its clone
/// only on a cache miss.
C2COutcome run_c2c(const C2CScenarioSpec& spec, const TopologyParams& topo = {},
                   const CloneParams& clones = {}, std::uint64_t seed = 0);

// ---- clone-buffered streaming ----------------------------------------------

struct StreamingSpec {
  double bitrate = 1508000.0;  // bits/s
  double duration = 60.0;      // s
  double wireless_loss = 0.0;  // on the access downlink
  bool with_clone = true;
  std::uint32_t packet_payload = net::kDefaultMtuPayload;

  void validate() const;
  std::uint64_t total_bytes() const;
};

/// Streams bitrate x duration bits from "server" to "ue0", paced at the
/// bitrate. With a clone, losses are recovered from the edge site;
/// otherwise from the server.
metrics::MetricsReport run_streaming(const StreamingSpec& spec, const TopologyParams& topo = {},
                                     std::uint64_t seed = 0);

// ---- MPTCP proxy -----------------------------------------------------------

struct MptcpSpec {
  std::vector<net::Link> access_paths;
  net::Link clone_to_server;

  void validate() const;
};

struct MptcpResult {
  double throughput = 0.0;  // bits/s
  double completion = 0.0;  // s
};

/// Fluid model of a clone terminating multipath transport: the device side
/// aggregates all access paths, the server side is a single path.
MptcpResult run_mptcp_proxy(const MptcpSpec& spec, std::uint64_t bytes);
metrics::MetricsReport mptcp_report(const MptcpSpec& spec, std::uint64_t bytes,
                                    std::uint64_t seed = 0);

// ---- adaptive bitrate decided by the clone ---------------------------------

struct AbrLadder {
  std::vector<double> bitrates;  // strictly increasing, bits/s
  double safety_factor = 0.8;

  void validate() const;
};

/// Highest rung not above safety_factor x measured_rate, else the lowest.
double run_abr_offload(const AbrLadder& ladder, double measured_rate);

struct AbrSpec {
  AbrLadder ladder{{500000.0, 1500000.0, 3000000.0}, 0.8};
  std::vector<double> measured_rates{2200000.0};  // access rate per epoch
  double epoch = 1.0;                             // s between decisions

  void validate() const;
};

struct AbrOutcome {
  metrics::MetricsReport report;
  std::vector<double> chosen;
};

/// The device's clone reads the access rate from the base station once per
/// epoch and picks a rung; each decision is a clone-side event.
AbrOutcome run_abr(const AbrSpec& spec, const TopologyParams& topo = {},
                   const CloneParams& clones = {}, std::uint64_t seed = 0);

// ---- offloading with joint allocation --------------------------------------

struct TaskParams {
  double data_total = 8.0e6;   // D, bits
  double data_cached = 0.0;    // S, bits held by the clone cache
  double instructions = 4.0e9; // F
  double local_cpu = 1.0e9;
  std::uint64_t result_size = 0;  // bytes

  offload::ComputeTask task() const { return {data_total, data_cached, instructions}; }
  void validate() const;
};

enum class OffloadPolicy { Decide, Remote, Local };

OffloadPolicy parse_offload_policy(std::string_view name);

struct AllocationParams {
  controller::Capacity capacity{1.0e7, 1.0e10};
  controller::Objective objective = controller::Objective::MinSumTime;
  controller::Method method = controller::Method::Heuristic;
  int grid_steps = 200;
};

struct OffloadSpec {
  std::size_t users = 1;
  /// One task per user; a single entry applies to everyone.
  std::vector<TaskParams> tasks{TaskParams{}};
  OffloadPolicy policy = OffloadPolicy::Decide;
  std::optional<AllocationParams> allocation;

  void validate() const;
  const TaskParams& task_for(std::size_t user) const;
};

struct OffloadUserOutcome {
  std::string user;
  offload::OffloadDecision decision;
  double rate = 0.0;  // r used for the decision
  double cpu = 0.0;   // f used for the decision
  double duration = 0.0;
};

struct OffloadOutcome {
  metrics::MetricsReport report;
  double release_time = 0.0;
  std::vector<OffloadUserOutcome> users;
  std::optional<controller::AllocationPlan> plan;
};

/// Users "ue0".."ue{n-1}" each get a transient clone at "edge" whose cache
/// holds the task's cached input. Once every clone is Active the tasks are
/// released together, the controller (if configured) allocates once, and
/// each user runs locally or remotely. time.task.finish is the latest
/// completion measured from the release.
OffloadOutcome run_offload(const OffloadSpec& spec, const TopologyParams& topo = {},
                           const CloneParams& clones = {}, std::uint64_t seed = 0);

}  // namespace aqua::scenarios
