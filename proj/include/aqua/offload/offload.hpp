#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "aqua/clone/clone_manager.hpp"
#include "aqua/net/transport.hpp"

namespace aqua::offload {

/// An offloadable unit of work.
struct ComputeTask {
  double data_total = 0.0;    // bits needed by the task
  double data_cached = 0.0;   // bits of that input already in the network
  double instructions = 0.0;  // instruction count

  /// Throws DomainError unless 0 <= data_cached <= data_total and
  /// instructions >= 0, all finite.
  void validate() const;
  double uncached_bits() const noexcept { return data_total - data_cached; }
};

struct DeviceProfile {
  double local_cpu = 1.0e9;  // instructions/s
  std::optional<net::LinkIndex> access_link;
};

enum class Placement { Local, Remote };

struct OffloadDecision {
  Placement choice = Placement::Local;
  double t_local = 0.0;
  double t_remote = 0.0;
};

/// Offload completion estimate: transfer of the uncached input at rate `r`
/// (bits/s) plus remote execution at speed `f` (instructions/s),
///   T = (D - S) / r + F / f.
/// Throws DomainError for r <= 0 or f <= 0.
double remote_time(const ComputeTask& task, double r, double f);

/// F / local_cpu.
double local_time(const ComputeTask& task, const DeviceProfile& device);

/// Remote only when strictly faster; ties run locally.
OffloadDecision decide(const ComputeTask& task, const DeviceProfile& device, double r, double f);

/// Returns `task` with data_cached taken from a clone cache lookup: the
/// cached item's size in bits on a hit (capped at data_total), 0 on a miss.
ComputeTask bind_cached_input(ComputeTask task, const clone::CacheLookup& lookup);

/// Bytes actually uploaded for a task: ceil((D - S) / 8).
std::uint64_t upload_bytes(const ComputeTask& task);

struct OffloadResult {
  double start_time = 0.0;
  double upload_done = 0.0;
  double compute_done = 0.0;
  double finish_time = 0.0;  // absolute
  net::SegmentCounters first_tx_bytes{};
  net::SegmentCounters retransmit_bytes{};

  double duration() const noexcept { return finish_time - start_time; }
};

/// Runs offloaded tasks as upload -> compute -> result download events.
///
/// Each clone executes one task at a time; a task submitted while the clone
/// is busy starts computing when the previous one finishes. Throws
/// OffloadFailed (from the event loop) when the clone is not Active at a
/// step boundary.
class Offloader {
 public:
  using Done = std::function<void(const OffloadResult&)>;

  explicit Offloader(clone::CloneManager& clones, metrics::MetricsReport* report = nullptr)
      : clones_(clones), report_(report) {}

  /// `uplink` runs from the device to the clone's site; the result travels
  /// back over `downlink` (route from the site to the device when empty).
  void execute(const ComputeTask& task, const std::string& user, clone::Tier tier,
               const net::Path& uplink, std::uint64_t result_size, Done done,
               net::Path downlink = {});

  /// Local execution on the device; completes after F / local_cpu.
  void execute_local(const ComputeTask& task, const DeviceProfile& device, Done done);

 private:
  struct Run;
  void compute(const std::shared_ptr<Run>& run);
  void download(const std::shared_ptr<Run>& run);
  clone::Clone& require(const Run& run, const char* step);
  void record(std::string_view key, std::uint64_t delta);

  clone::CloneManager& clones_;
  metrics::MetricsReport* report_;
  std::map<std::uint64_t, double> busy_until_;  // clone instance -> time
};

}  // namespace aqua::offload
