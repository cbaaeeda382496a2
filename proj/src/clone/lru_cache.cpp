#include "aqua/clone/lru_cache.hpp"

#include "aqua/errors.hpp"

namespace aqua::clone {

std::optional<std::uint64_t> LruCache::get(std::string_view id) {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  order_.splice(order_.begin(), order_, it->second);
  return it->second->size;
}

std::vector<ContentItem> LruCache::put(ContentItem item) {
  if (item.size == 0) throw ConfigurationError("content item '" + item.id + "' has zero size");
  if (item.size > capacity_) {
    throw ItemTooLarge("content item '" + item.id + "' (" + std::to_string(item.size) +
                       " B) exceeds cache capacity " + std::to_string(capacity_) + " B");
  }
  erase(item.id);
  std::vector<ContentItem> evicted;
  while (used_ + item.size > capacity_) {
    ContentItem& victim = order_.back();
    used_ -= victim.size;
    index_.erase(victim.id);
    evicted.push_back(std::move(victim));
    order_.pop_back();
  }
  used_ += item.size;
  order_.push_front(std::move(item));
  index_.emplace(order_.front().id, order_.begin());
  return evicted;
}

bool LruCache::erase(std::string_view id) {
  auto it = index_.find(id);
  if (it == index_.end()) return false;
  used_ -= it->second->size;
  order_.erase(it->second);
  index_.erase(it);
  return true;
}

void LruCache::clear() {
  order_.clear();
  index_.clear();
  used_ = 0;
}

}  // namespace aqua::clone
