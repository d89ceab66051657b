#include "manifest.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/sha.h>

namespace brine::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  std::string hex;
  for (unsigned char b : digest) hex += fmt::format("{:02x}", b);
  return hex;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& [path, digest] : digests) outputs.push_back({{"path", path}, {"sha256", digest}});
  return {{"command", command}, {"version", version}, {"config", config}, {"seeds", seeds}, {"outputs", outputs}};
}

}  // namespace brine::cli
