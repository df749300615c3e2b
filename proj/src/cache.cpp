#include "rquge/cache.hpp"

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "rquge/error.hpp"

namespace rquge {

std::string sha256_hex(std::initializer_list<std::string_view> fields) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw Error("EVP_MD_CTX_new failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  for (auto f : fields) {
    // 8-byte little-endian length prefix keeps field boundaries unambiguous.
    std::uint64_t n = f.size();
    unsigned char len[8];
    for (int i = 0; i < 8; ++i) len[i] = static_cast<unsigned char>(n >> (8 * i));
    EVP_DigestUpdate(ctx, len, sizeof len);
    EVP_DigestUpdate(ctx, f.data(), f.size());
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  EVP_DigestFinal_ex(ctx, digest, &digest_len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(digest_len * 2);
  for (unsigned int i = 0; i < digest_len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string CacheKey::filename() const {
  return sha256_hex({runner_name, operation, content_hash}) + ".json";
}

CacheKey make_cache_key(std::string_view runner_name, std::string_view operation,
                        std::initializer_list<std::string_view> inputs) {
  return CacheKey{std::string(runner_name), std::string(operation), sha256_hex(inputs)};
}

std::optional<std::filesystem::path> resolve_cache_dir(
    const std::optional<std::filesystem::path>& configured) {
  if (const char* env = std::getenv("RQUGE_CACHE_DIR"); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return configured;
}

ResultCache::ResultCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec || !std::filesystem::is_directory(directory_)) {
    throw ConfigError("cache directory '" + directory_.string() + "' is not writable");
  }
}

std::optional<Json> ResultCache::get(const CacheKey& key) const {
  const auto path = directory_ / key.filename();
  bool corrupt = false;
  {
    std::shared_lock lock(mutex_);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      ++misses_;
      return std::nullopt;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      Json entry = Json::parse(buf.str());
      if (entry.at("runner") == key.runner_name && entry.at("operation") == key.operation &&
          entry.at("content_hash") == key.content_hash && entry.contains("value")) {
        ++hits_;
        return entry.at("value");
      }
      corrupt = true;
    } catch (const nlohmann::json::exception&) {
      corrupt = true;
    }
  }
  if (corrupt) {
    spdlog::warn("discarding corrupt cache entry {}", path.string());
    std::unique_lock lock(mutex_);
    std::error_code ec;
    std::filesystem::remove(path, ec);
    ++discarded_;
  }
  ++misses_;
  return std::nullopt;
}

void ResultCache::put(const CacheKey& key, const Json& value) {
  Json entry;
  entry["runner"] = key.runner_name;
  entry["operation"] = key.operation;
  entry["content_hash"] = key.content_hash;
  entry["value"] = value;
  const auto path = directory_ / key.filename();
  thread_local std::mt19937_64 tmp_names{std::random_device{}()};
  const auto tmp = directory_ / (key.filename() + ".tmp" + std::to_string(tmp_names()));

  std::unique_lock lock(mutex_);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache entry '" + tmp.string() + "'");
    out << entry.dump();
    if (!out) throw Error("cannot write cache entry '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace rquge
