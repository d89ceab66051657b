#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace brine::cli {

std::string sha256_hex(const std::string& bytes);
/// Throws std::runtime_error if the file cannot be read.
std::string sha256_file(const std::string& path);

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::string version;
  std::vector<std::uint64_t> seeds;
  std::vector<std::pair<std::string, std::string>> digests;  ///< (path, sha256)

  nlohmann::json to_json() const;
};

}  // namespace brine::cli
