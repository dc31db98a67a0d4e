#include "kodaira/cache.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace kodaira {

namespace fs = std::filesystem;

std::string CacheStore::key_hash(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string CacheStore::path_for(const std::string& label, const std::string& key) const {
  std::string safe_label;
  for (char c : label) safe_label += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return dir_ + "/" + kEngineVersion + "/" + safe_label + "/" + key_hash(key) + ".json";
}

std::optional<std::string> CacheStore::get(const std::string& label,
                                           const std::string& key) const {
  if (!enabled()) return std::nullopt;
  std::ifstream in(path_for(label, key));
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void CacheStore::put(const std::string& label, const std::string& key,
                     const std::string& payload) const {
  if (!enabled()) return;
  fs::path p = path_for(label, key);
  fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << payload;
  }
  fs::rename(tmp, p);
}

}  // namespace kodaira
