#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nlturing {

inline constexpr const char* kToolVersion = "0.1.0";

/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  /// (path relative to output_dir, sha256) in write order.
  std::vector<std::pair<std::string, std::string>> artifacts;
};

/// Builds a manifest for files already written into `dir`.
RunManifest make_manifest(const std::string& command, const std::string& canonical_config,
                          std::uint64_t seed, const std::filesystem::path& dir,
                          const std::vector<std::filesystem::path>& files);

/// Writes `manifest.json` into the output directory and returns its path.
std::filesystem::path write_manifest(const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace nlturing
