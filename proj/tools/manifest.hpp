#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "slide/errors.hpp"

namespace slide_cli {

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

// Staged outputs: everything is rendered in memory first and only written
// once the whole command has succeeded, so failures leave no partial files.
class OutputStage {
 public:
  void add(const std::string& path, std::string content) {
    files_.emplace_back(path, std::move(content));
  }

  bool empty() const { return files_.empty(); }

  nlohmann::json hashes() const {
    nlohmann::json h = nlohmann::json::object();
    for (const auto& [path, content] : files_) h[path] = hex64(fnv1a64(content));
    return h;
  }

  void write_all() const {
    for (const auto& [path, content] : files_) {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw slide::ValidationError("cannot write output file: " + path);
      out << content;
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

class RunTimer {
 public:
  RunTimer() : start_(std::chrono::steady_clock::now()) {}

  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// One manifest per command run, written next to the primary output. Captures
// the resolved parameters and artifact hashes needed to reproduce the run.
inline void write_manifest(const std::string& anchor_path, const std::string& command,
                           const nlohmann::json& parameters, std::uint64_t seed,
                           const OutputStage& stage, const RunTimer& timer) {
  nlohmann::json m;
  m["command"] = command;
  m["parameters"] = parameters;
  m["seed"] = seed;
  m["artifact_hashes"] = stage.hashes();
  m["wall_time_ms"] = timer.elapsed_ms();
  std::ofstream out(anchor_path + ".manifest.json");
  if (!out)
    throw slide::ValidationError("cannot write manifest: " + anchor_path + ".manifest.json");
  out << m.dump(2) << "\n";
}

}  // namespace slide_cli
