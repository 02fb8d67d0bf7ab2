// Copyright 2026 The pcot-harness Authors
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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <openssl/evp.h>
#include <nlohmann/json.hpp>

#include "pcot/error.hpp"
#include "pcot/llm/types.hpp"

namespace pcot::llm {

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xF]);
  }
  return out;
}

/// Inputs the cache key is computed from.
inline nlohmann::json cache_key_inputs(const std::string& model_id, double temperature,
                                       std::optional<std::int64_t> seed,
                                       const std::vector<prompt::DialogueTurn>& turns) {
  nlohmann::json j;
  j["model_id"] = model_id;
  j["temperature"] = temperature;
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  auto& arr = j["turns"] = nlohmann::json::array();
  for (const auto& t : turns) arr.push_back({{"role", prompt::to_string(t.role)}, {"content", t.content}});
  return j;
}

/// Digest over a length-prefixed byte encoding of the inputs, so any byte change in any
/// field changes the key (including bytes that are not valid UTF-8).
inline std::string cache_key(const nlohmann::json& inputs) {
  std::string buf;
  auto field = [&](std::string_view v) {
    buf += std::to_string(v.size());
    buf.push_back(':');
    buf.append(v);
  };
  field(inputs.at("model_id").get_ref<const std::string&>());
  field(inputs.at("temperature").dump());
  field(inputs.at("seed").dump());
  for (const auto& t : inputs.at("turns")) {
    field(t.at("role").get_ref<const std::string&>());
    field(t.at("content").get_ref<const std::string&>());
  }
  return sha256_hex(buf);
}

inline std::string dump_lossy(const nlohmann::json& j, int indent = -1) {
  return j.dump(indent, ' ', false, nlohmann::json::error_handler_t::replace);
}

/// On-disk record/replay cache: one JSON file per key under `<dir>/<key[0..2]>/<key>.json`.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create cache directory " + dir_.string() + ": " + ec.message());
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path path_for(const std::string& key) const { return dir_ / key.substr(0, 2) / (key + ".json"); }

  std::optional<nlohmann::json> get(const std::string& key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;  // torn or foreign file; treated as a miss and overwritten
    }
  }

  /// Atomic replace: write to a unique temp file, then rename.
  void put(const std::string& key, const nlohmann::json& record) const {
    auto path = path_for(key);
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    static std::atomic<unsigned long> seq{0};
    std::ostringstream tmpname;
    tmpname << path.filename().string() << ".tmp." << std::this_thread::get_id() << "." << seq++;
    auto tmp = path.parent_path() / tmpname.str();
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write cache file " + tmp.string());
      out << dump_lossy(record, 2) << '\n';
      if (!out) throw IoError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move cache file into place: " + ec.message());
  }

  /// Mutex serializing lookup and fill for one key.
  std::shared_ptr<std::mutex> key_lock(const std::string& key) {
    std::lock_guard<std::mutex> g(locks_mu_);
    auto& slot = locks_[key];
    if (!slot) slot = std::make_shared<std::mutex>();
    return slot;
  }

 private:
  std::filesystem::path dir_;
  std::mutex locks_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace pcot::llm
