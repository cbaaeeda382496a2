#pragma once

#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aqua::clone {

struct ContentItem {
  std::string id;
  std::uint64_t size = 0;  // bytes, > 0

  bool operator==(const ContentItem&) const = default;
};

/// Byte-bounded LRU cache of content items.
class LruCache {
 public:
  explicit LruCache(std::uint64_t capacity_bytes) : capacity_(capacity_bytes) {}

  std::uint64_t capacity() const noexcept { return capacity_; }
  std::uint64_t used() const noexcept { return used_; }
  std::size_t size() const noexcept { return order_.size(); }
  bool empty() const noexcept { return order_.empty(); }

  /// Size of `id` if present; a hit makes it most recently used.
  std::optional<std::uint64_t> get(std::string_view id);

  /// Presence check without touching recency.
  bool contains(std::string_view id) const { return index_.contains(id); }

  /// Inserts or refreshes `item`, evicting least recently used entries until
  /// it fits. Returns the evicted items, oldest first. Throws ItemTooLarge
  /// when the item alone exceeds capacity.
  std::vector<ContentItem> put(ContentItem item);

  bool erase(std::string_view id);
  void clear();

  /// Entries from most to least recently used.
  std::vector<ContentItem> items() const { return {order_.begin(), order_.end()}; }

 private:
  std::uint64_t capacity_;
  std::uint64_t used_ = 0;
  std::list<ContentItem> order_;  // front = most recent
  std::map<std::string, std::list<ContentItem>::iterator, std::less<>> index_;
};

}  // namespace aqua::clone
