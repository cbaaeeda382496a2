#include "aqua/clone/clone_manager.hpp"

#include <cmath>

#include "aqua/errors.hpp"

namespace aqua::clone {

CloneManager::CloneManager(net::Network& network, std::string central_node,
                           metrics::MetricsReport* report)
    : net_(network), central_(std::move(central_node)), report_(report) {
  net_.topology().node_index(central_);
}

void CloneManager::record(std::string_view key, std::uint64_t delta) {
  if (report_) report_->record(key, delta);
}

void CloneManager::add_site(EdgeSite site) {
  net_.topology().node_index(site.node);
  if (site.slot_capacity == 0) {
    throw ConfigurationError("site '" + site.node + "' needs slot_capacity >= 1");
  }
  if (!std::isfinite(site.cpu_pool) || site.cpu_pool <= 0.0) {
    throw ConfigurationError("site '" + site.node + "' needs a finite cpu_pool > 0");
  }
  if (sites_.contains(site.node)) {
    throw ConfigurationError("duplicate edge site '" + site.node + "'");
  }
  usage_.emplace(site.node, SiteUsage{});
  std::string name = site.node;
  sites_.emplace(std::move(name), std::move(site));
}

const EdgeSite& CloneManager::site(std::string_view node) const {
  auto it = sites_.find(node);
  if (it == sites_.end()) throw ConfigurationError("unknown edge site '" + std::string(node) + "'");
  return it->second;
}

SiteUsage CloneManager::usage(std::string_view node) const {
  site(node);
  return usage_.find(node)->second;
}

SiteUsage& CloneManager::usage_mut(std::string_view node) {
  site(node);
  return usage_.find(node)->second;
}

std::vector<std::string> CloneManager::site_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : sites_) out.push_back(name);
  return out;
}

void CloneManager::transition(Clone& c, CloneState to) {
  if (!is_legal_transition(c.state, to)) {
    throw ConfigurationError("illegal clone transition for " + c.owner + ": " +
                             std::string(state_name(c.state)) + " -> " +
                             std::string(state_name(to)));
  }
  log_.push_back(TransitionRecord{c.instance, c.owner, c.tier, c.state, to, net_.simulator().now()});
  c.state = to;
}

Clone& CloneManager::create_persistent(const std::string& user, std::uint64_t storage_capacity,
                                       double cpu_capacity) {
  const Key key{user, Tier::Persistent};
  if (clones_.contains(key)) {
    throw ConfigurationError("user '" + user + "' already has a persistent clone");
  }
  if (!std::isfinite(cpu_capacity) || cpu_capacity < 0.0) {
    throw ConfigurationError("persistent clone cpu_capacity must be finite and >= 0");
  }
  auto c = std::make_unique<Clone>();
  c->instance = next_instance_++;
  c->owner = user;
  c->tier = Tier::Persistent;
  c->site = central_;
  c->cpu_capacity = cpu_capacity;
  c->cache = LruCache(storage_capacity);
  Clone& ref = *c;
  clones_.emplace(key, std::move(c));
  transition(ref, CloneState::Spawning);
  transition(ref, CloneState::Active);
  return ref;
}

void CloneManager::ship(std::string_view from, std::string_view to, std::uint64_t bytes,
                        std::function<void()> arrived) {
  const auto& topo = net_.topology();
  const auto path = topo.route(from, to);
  if (bytes == 0 || path.empty()) {
    net_.simulator().schedule_in(net::path_latency(topo, path), std::move(arrived));
    return;
  }
  auto session = net::make_session(topo, path, bytes);
  net_.start_transfer(session, [arrived = std::move(arrived)](const net::TransferResult&) {
    arrived();
  });
}

void CloneManager::spawn(const std::string& user, std::string_view site_name,
                         const SpawnParams& params, Done on_active) {
  const EdgeSite& s = site(site_name);
  if (!find(user, Tier::Persistent)) {
    throw ConfigurationError("user '" + user + "' has no persistent clone to pull from");
  }
  if (clones_.contains(Key{user, Tier::Transient})) {
    throw ConfigurationError("user '" + user + "' already has a transient clone");
  }
  if (!std::isfinite(params.cpu_capacity) || params.cpu_capacity < 0.0) {
    throw ConfigurationError("clone cpu_capacity must be finite and >= 0");
  }
  SiteUsage& u = usage_mut(site_name);
  if (u.slots_used >= s.slot_capacity) {
    throw SpawnRejected("site '" + s.node + "' has no free slot for '" + user + "'");
  }
  if (u.cpu_allocated + params.cpu_capacity > s.cpu_pool) {
    throw SpawnRejected("site '" + s.node + "' cpu pool cannot host '" + user + "'");
  }

  auto c = std::make_unique<Clone>();
  c->instance = next_instance_++;
  c->owner = user;
  c->tier = Tier::Transient;
  c->site = s.node;
  c->cpu_capacity = params.cpu_capacity;
  c->profile_size = params.profile_size;
  c->cache = LruCache(params.storage_capacity);
  Clone& ref = *c;
  clones_.emplace(Key{user, Tier::Transient}, std::move(c));
  u.slots_used += 1;
  u.cpu_allocated += params.cpu_capacity;
  transition(ref, CloneState::Spawning);

  const std::uint64_t instance = ref.instance;
  ship(central_, s.node, params.profile_size, [this, user, instance, on_active] {
    Clone* c = find(user, Tier::Transient);
    if (!c || c->instance != instance) return;
    transition(*c, CloneState::Active);
    record("count.spawn", 1);
    if (on_active) on_active(*c);
  });
}

void CloneManager::destroy(const std::string& user) {
  if (auto* p = find(user, Tier::Persistent); p && !find(user, Tier::Transient)) {
    throw ConfigurationError("cannot destroy the persistent clone of '" + user + "'");
  }
  auto it = clones_.find(Key{user, Tier::Transient});
  if (it == clones_.end()) {
    throw ConfigurationError("user '" + user + "' has no transient clone to destroy");
  }
  Clone& c = *it->second;
  transition(c, CloneState::Destroyed);
  SiteUsage& u = usage_mut(c.site);
  u.slots_used -= 1;
  u.cpu_allocated -= c.cpu_capacity;
  if (u.slots_used == 0) u.cpu_allocated = 0.0;
  record("count.destroy", 1);
  clones_.erase(it);
}

void CloneManager::migrate(const std::string& user, std::string_view dst_site, Done on_done) {
  Clone& c = active(user, Tier::Transient);
  const EdgeSite& dst = site(dst_site);
  if (dst.node == c.site) {
    throw ConfigurationError("clone of '" + user + "' is already at '" + dst.node + "'");
  }
  SiteUsage& du = usage_mut(dst.node);
  if (du.slots_used >= dst.slot_capacity || du.cpu_allocated + c.cpu_capacity > dst.cpu_pool) {
    throw MigrationRejected("site '" + dst.node + "' cannot accept the clone of '" + user + "'");
  }
  du.slots_used += 1;
  du.cpu_allocated += c.cpu_capacity;
  transition(c, CloneState::Migrating);

  const std::uint64_t bytes = c.profile_size + c.cache.used();
  const std::uint64_t instance = c.instance;
  const std::string src = c.site;
  const std::string dst_name = dst.node;
  ship(src, dst_name, bytes, [this, user, instance, src, dst_name, on_done] {
    Clone* c = find(user, Tier::Transient);
    if (!c || c->instance != instance) return;
    SiteUsage& su = usage_mut(src);
    su.slots_used -= 1;
    su.cpu_allocated -= c->cpu_capacity;
    if (su.slots_used == 0) su.cpu_allocated = 0.0;
    c->site = dst_name;
    transition(*c, CloneState::Active);
    record("count.migrate", 1);
    if (on_done) on_done(*c);
  });
}

CacheLookup CloneManager::cache_get(const std::string& user, Tier tier,
                                    std::string_view content_id) {
  Clone* c = find(user, tier);
  if (c && c->state == CloneState::Active) {
    if (auto size = c->cache.get(content_id)) {
      record("count.cache.hit", 1);
      return CacheLookup{true, *size};
    }
  }
  record("count.cache.miss", 1);
  return CacheLookup{};
}

std::vector<ContentItem> CloneManager::cache_put(const std::string& user, Tier tier,
                                                 ContentItem item) {
  return active(user, tier).cache.put(std::move(item));
}

Clone* CloneManager::find(const std::string& user, Tier tier) {
  auto it = clones_.find(Key{user, tier});
  return it == clones_.end() ? nullptr : it->second.get();
}

const Clone* CloneManager::find(const std::string& user, Tier tier) const {
  auto it = clones_.find(Key{user, tier});
  return it == clones_.end() ? nullptr : it->second.get();
}

Clone& CloneManager::active(const std::string& user, Tier tier) {
  Clone* c = find(user, tier);
  if (!c || c->state != CloneState::Active) {
    throw ConfigurationError("user '" + user + "' has no active " + std::string(tier_name(tier)) +
                             " clone");
  }
  return *c;
}

bool CloneManager::cpu_fits(const Clone& clone, double cpu) const {
  if (clone.tier == Tier::Persistent) return true;
  const auto& s = site(clone.site);
  const auto u = usage(clone.site);
  return u.cpu_allocated - clone.cpu_capacity + cpu <= s.cpu_pool;
}

void CloneManager::set_cpu_capacity(const std::string& user, Tier tier, double cpu) {
  Clone& c = active(user, tier);
  if (!std::isfinite(cpu) || cpu < 0.0) {
    throw ConfigurationError("cpu capacity must be finite and >= 0");
  }
  if (!cpu_fits(c, cpu)) {
    throw ConfigurationError("cpu capacity " + std::to_string(cpu) + " for '" + user +
                             "' exceeds the pool of site '" + c.site + "'");
  }
  if (tier == Tier::Transient) usage_mut(c.site).cpu_allocated += cpu - c.cpu_capacity;
  c.cpu_capacity = cpu;
}

}  // namespace aqua::clone
