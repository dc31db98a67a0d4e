#pragma once

#include <optional>
#include <string>

namespace kodaira {

inline constexpr const char* kEngineVersion = "1.0.0";

/// Result cache for expensive enumerations, laid out as
/// <dir>/<engine-version>/<label>/<key-hash>.json. Writes are atomic
/// (temp file + rename). A default-constructed store is disabled.
class CacheStore {
 public:
  CacheStore() = default;
  explicit CacheStore(std::string dir) : dir_(std::move(dir)) {}

  bool enabled() const { return !dir_.empty(); }

  /// Stable FNV-1a digest of the canonical parameter string.
  static std::string key_hash(const std::string& canonical_params);

  std::optional<std::string> get(const std::string& label, const std::string& key) const;
  void put(const std::string& label, const std::string& key, const std::string& payload) const;

 private:
  std::string dir_;
  std::string path_for(const std::string& label, const std::string& key) const;
};

}  // namespace kodaira
