#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "rquge/core.hpp"

namespace rquge {

/// Content address of one runner call. The runner name must carry the
/// model version so that swapping checkpoints never hits stale entries.
struct CacheKey {
  std::string runner_name;
  std::string operation;
  std::string content_hash;  // hex SHA-256 over all inputs

  /// File name under the cache directory.
  std::string filename() const;
  bool operator==(const CacheKey&) const = default;
};

/// Hex SHA-256 of the concatenation of length-prefixed fields.
std::string sha256_hex(std::initializer_list<std::string_view> fields);

CacheKey make_cache_key(std::string_view runner_name, std::string_view operation,
                        std::initializer_list<std::string_view> inputs);

/// Directory from $RQUGE_CACHE_DIR when set, else the configured one.
std::optional<std::filesystem::path> resolve_cache_dir(
    const std::optional<std::filesystem::path>& configured);

/// One JSON file per key. Concurrent readers, exclusive writers; writes go
/// through a temp file and rename so readers never see half an entry.
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path directory);

  /// Unreadable or mismatching entries are deleted and reported as misses.
  std::optional<Json> get(const CacheKey& key) const;
  void put(const CacheKey& key, const Json& value);

  const std::filesystem::path& directory() const { return directory_; }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  std::size_t discarded() const { return discarded_; }

 private:
  std::filesystem::path directory_;
  mutable std::shared_mutex mutex_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
  mutable std::atomic<std::size_t> discarded_{0};
};

/// Serves `compute()` through the cache. A null cache just computes.
template <typename F>
Json cached(ResultCache* cache, const CacheKey& key, F&& compute) {
  if (cache == nullptr) return compute();
  if (auto hit = cache->get(key)) return *std::move(hit);
  Json value = compute();
  cache->put(key, value);
  return value;
}

}  // namespace rquge
