#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aqua/clone/lifecycle.hpp"
#include "aqua/clone/lru_cache.hpp"
#include "aqua/metrics/report.hpp"
#include "aqua/net/transport.hpp"

namespace aqua::clone {

/// A user's dedicated compute and storage space.
struct Clone {
  std::uint64_t instance = 0;
  std::string owner;
  Tier tier = Tier::Transient;
  CloneState state = CloneState::Absent;
  std::string site;             // hosting node label
  double cpu_capacity = 0.0;    // instructions/s
  std::uint64_t profile_size = 0;
  LruCache cache{0};

  std::uint64_t storage_capacity() const noexcept { return cache.capacity(); }
};

/// Mobile-cloud site next to a base station or BBU pool.
struct EdgeSite {
  std::string node;
  std::size_t slot_capacity = 1;
  double cpu_pool = 0.0;  // instructions/s shared by hosted transient clones
};

struct SiteUsage {
  std::size_t slots_used = 0;
  double cpu_allocated = 0.0;
};

struct SpawnParams {
  std::uint64_t profile_size = 0;      // bytes pulled from the central cloud
  double cpu_capacity = 0.0;
  std::uint64_t storage_capacity = 0;
};

struct CacheLookup {
  bool hit = false;
  std::uint64_t size = 0;
};

/// Owns every clone of a run and drives their lifecycle over the network.
///
/// Persistent clones sit at the central cloud node, are always Active and
/// have no slot limit. Transient clones occupy a slot and a share of their
/// site's CPU pool from the moment they start spawning (or, for the
/// destination of a migration, from the moment the migration starts).
class CloneManager {
 public:
  using Done = std::function<void(Clone&)>;

  CloneManager(net::Network& network, std::string central_node,
               metrics::MetricsReport* report = nullptr);

  void add_site(EdgeSite site);
  const EdgeSite& site(std::string_view node) const;
  SiteUsage usage(std::string_view node) const;
  std::vector<std::string> site_names() const;

  Clone& create_persistent(const std::string& user, std::uint64_t storage_capacity,
                           double cpu_capacity = 0.0);

  /// Pulls `params.profile_size` bytes from the central cloud to `site` and
  /// activates the transient clone when they arrive. Throws SpawnRejected
  /// when the site has no free slot or CPU share.
  void spawn(const std::string& user, std::string_view site, const SpawnParams& params,
             Done on_active = {});

  /// Releases the user's Active transient clone and discards its cache.
  void destroy(const std::string& user);

  /// Moves the user's transient clone, shipping profile plus cached bytes.
  /// Throws MigrationRejected, leaving the clone untouched, when `dst_site`
  /// is full.
  void migrate(const std::string& user, std::string_view dst_site, Done on_done = {});

  /// Miss when the clone does not exist or is not Active.
  CacheLookup cache_get(const std::string& user, Tier tier, std::string_view content_id);
  std::vector<ContentItem> cache_put(const std::string& user, Tier tier, ContentItem item);

  Clone* find(const std::string& user, Tier tier);
  const Clone* find(const std::string& user, Tier tier) const;
  /// Throws ConfigurationError when the user has no Active clone in `tier`.
  Clone& active(const std::string& user, Tier tier);

  /// Whether `cpu` instructions/s fit at the clone's site if the clone were
  /// resized to it.
  bool cpu_fits(const Clone& clone, double cpu) const;
  void set_cpu_capacity(const std::string& user, Tier tier, double cpu);

  const std::vector<TransitionRecord>& transitions() const noexcept { return log_; }
  net::Network& network() noexcept { return net_; }
  const std::string& central_node() const noexcept { return central_; }

 private:
  using Key = std::pair<std::string, Tier>;

  void transition(Clone& c, CloneState to);
  SiteUsage& usage_mut(std::string_view node);
  void ship(std::string_view from, std::string_view to, std::uint64_t bytes,
            std::function<void()> arrived);
  void record(std::string_view key, std::uint64_t delta);

  net::Network& net_;
  std::string central_;
  metrics::MetricsReport* report_;
  std::map<std::string, EdgeSite, std::less<>> sites_;
  std::map<std::string, SiteUsage, std::less<>> usage_;
  std::map<Key, std::unique_ptr<Clone>> clones_;
  std::vector<TransitionRecord> log_;
  std::uint64_t next_instance_ = 0;
};

}  // namespace aqua::clone
