// Copyright 2026 The Polyrule Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "polyrule/geometry.hpp"
#include "polyrule/version.hpp"

namespace polyrule {

// On-disk result store: one JSON document per (operation, canonical seed
// key), so expensive searches are resumable and repeat runs are free. Safe
// for concurrent readers; writers use a write-then-rename so a torn write
// never corrupts an entry. Entries written by another engine version are
// ignored.
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  // Cache directory from --cache flag or the POLYRULE_CACHE environment
  // variable; nullopt disables caching.
  static std::optional<ResultCache> resolve(const std::string& flag_dir) {
    if (!flag_dir.empty()) return ResultCache(flag_dir);
    if (const char* env = std::getenv("POLYRULE_CACHE"); env && *env)
      return ResultCache(env);
    return std::nullopt;
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::optional<nlohmann::json> get(std::string_view op,
                                    const CanonicalKey& key) const {
    const auto path = entry_path(op, key);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception&) {
      raise(Errc::CacheCorrupt, "unreadable cache entry " + path.string());
    }
    if (!doc.is_object() || !doc.contains("key") || !doc.contains("result"))
      raise(Errc::CacheCorrupt, "malformed cache entry " + path.string());
    if (doc["key"] != hex_key(key)) return std::nullopt;  // hash collision
    if (doc.value("engine", "") != kEngineVersion) return std::nullopt;
    return doc["result"];
  }

  void put(std::string_view op, const CanonicalKey& key,
           const nlohmann::json& result) const {
    const auto path = entry_path(op, key);
    std::filesystem::create_directories(path.parent_path());
    nlohmann::json doc;
    doc["key"] = hex_key(key);
    doc["engine"] = kEngineVersion;
    doc["result"] = result;
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << doc.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
  }

 private:
  static std::string hex_key(const CanonicalKey& key) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(key.bytes.size() * 2);
    for (unsigned char b : key.bytes) {
      out.push_back(kHex[b >> 4]);
      out.push_back(kHex[b & 15]);
    }
    return out;
  }

  std::filesystem::path entry_path(std::string_view op,
                                   const CanonicalKey& key) const {
    std::uint64_t h = 14695981039346656037ull;  // FNV-1a
    for (unsigned char b : key.bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
    char name[32];
    std::snprintf(name, sizeof name, "%016llx.json",
                  static_cast<unsigned long long>(h));
    return dir_ / std::string(op) / name;
  }

  std::filesystem::path dir_;
};

}  // namespace polyrule
