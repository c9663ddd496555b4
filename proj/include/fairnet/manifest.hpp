#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairnet/error.hpp"
#include "fairnet/io.hpp"

namespace fairnet::io {

inline constexpr const char* kToolVersion = "0.1.0";

// Writes data files into one directory and records each with its checksum.
// Files written through a set that is never committed are removed when the
// set goes out of scope, so a failed run leaves no partial outputs behind.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) std::filesystem::remove(dir_ / f.name, ec);
  }

  const std::filesystem::path& dir() const noexcept { return dir_; }

  void write(const std::string& name, const std::string& bytes) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Error::Category::internal, "cannot write " + (dir_ / name).string());
    files_.push_back({name, hex64(fnv1a64(bytes)), bytes.size()});
    out << bytes;
    if (!out) throw Error(Error::Category::internal, "write failed for " + name);
  }

  template <class Fn>
  void write_with(const std::string& name, Fn&& fn) {
    std::ostringstream os;
    fn(os);
    write(name, os.str());
  }

  nlohmann::json file_table() const {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& f : files_) {
      table.push_back({{"file", f.name}, {"fnv1a64", f.checksum}, {"bytes", f.size}});
    }
    return table;
  }

  void commit() { committed_ = true; }

 private:
  struct Entry {
    std::string name;
    std::string checksum;
    std::size_t size;
  };
  std::filesystem::path dir_;
  std::vector<Entry> files_;
  bool committed_ = false;
};

inline nlohmann::json to_json(const GeneratorConfig& c) {
  return {{"preset", to_string(c.preset)}, {"n", c.n},         {"m", c.m},
          {"l", c.l},                      {"h", c.h},         {"alpha", c.alpha},
          {"l_d", c.l_d},                  {"p_d", c.p_d},     {"rng_seed", c.rng_seed}};
}

inline nlohmann::json to_json(const ContagionConfig& c) {
  return {{"kind", to_string(c.kind)},
          {"a", c.activation_threshold},
          {"r_within", c.r_within},
          {"r_between", c.r_between},
          {"seeds", c.seed_count},
          {"bucket", to_string(c.bucket)},
          {"max_steps", c.max_steps},
          {"bins", c.bins},
          {"rng_seed", c.rng_seed}};
}

inline nlohmann::json to_json(const SweepSpec& s) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : s.cells) cells.push_back(c.label());
  return {{"name", s.name},
          {"axis", to_string(s.axis)},
          {"values", s.axis_values},
          {"realizations", s.realizations},
          {"master_seed", s.master_seed},
          {"epsilon", s.epsilon},
          {"coverage", s.coverage_fraction},
          {"generator", to_json(s.generator)},
          {"process",
           {{"a", s.process.activation_threshold},
            {"r_within", s.process.r_within},
            {"r_between", s.process.r_between_asymmetric},
            {"seeds", s.process.seed_count},
            {"bins", s.process.bins},
            {"max_steps", s.process.max_steps}}},
          {"cells", cells}};
}

}  // namespace fairnet::io
