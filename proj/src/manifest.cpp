#include "nlturing/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iterator>
#include <memory>
#include "json.hpp"
#include <stdexcept>

namespace nlturing {

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

RunManifest make_manifest(const std::string& command, const std::string& canonical_config,
                          std::uint64_t seed, const std::filesystem::path& dir,
                          const std::vector<std::filesystem::path>& files) {
  RunManifest m;
  m.command = command;
  m.config_digest = sha256_hex(canonical_config);
  m.seed = seed;
  m.output_dir = dir;
  for (const auto& f : files) {
    m.artifacts.emplace_back(std::filesystem::relative(f, dir).generic_string(),
                             sha256_file(f));
  }
  return m;
}

std::filesystem::path write_manifest(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["tool_version"] = m.tool_version;
  j["config_digest"] = m.config_digest;
  j["seed"] = m.seed;
  j["output_dir"] = m.output_dir.generic_string();
  j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& [path, digest] : m.artifacts) {
    j["artifacts"].push_back({{"path", path}, {"sha256", digest}});
  }
  const auto out_path = m.output_dir / "manifest.json";
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path.string());
  out << j.dump(2) << '\n';
  return out_path;
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto j = nlohmann::json::parse(in);
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.tool_version = j.at("tool_version").get<std::string>();
  m.config_digest = j.at("config_digest").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.output_dir = j.at("output_dir").get<std::string>();
  for (const auto& a : j.at("artifacts")) {
    m.artifacts.emplace_back(a.at("path").get<std::string>(), a.at("sha256").get<std::string>());
  }
  return m;
}

}  // namespace nlturing
