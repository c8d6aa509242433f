#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlturing/model.hpp"
#include "nlturing/pattern.hpp"
#include "nlturing/simulation.hpp"
#include "nlturing/snapshot_io.hpp"

namespace nlturing {

/// Raised for unknown keys, unparsable values and out-of-domain settings.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigKey {
  std::string section;
  std::string name;
  std::string default_value;
  std::string help;
};

/// Every recognised key with its default, in file order.
const std::vector<ConfigKey>& config_schema();

/// Raw key/value store keyed by bare key name (names are unique across
/// sections).
class ConfigStore {
 public:
  ConfigStore();

  /// Reads an INI file with sections [model] [grid] [time] [analysis].
  /// Unknown sections or keys, and keys in the wrong section, are errors.
  void load_file(const std::filesystem::path& path);
  void set(const std::string& name, const std::string& value);
  const std::string& get(const std::string& name) const;

  /// Canonical "section.key = value" text of every key, schema order.
  std::string canonical_text() const;

 private:
  std::map<std::string, std::string> values_;
};

struct RunConfig {
  SimConfig sim;
  PatternThresholds thresholds;
  std::vector<double> sigma_list;
  Axis eta_axis{};
  Axis kappa_axis{};
  Axis alpha_axis{};
  double mu_min = -0.02;
  double mu_max = 0.2;
  std::size_t mu_steps = 200;
  double k_max = 10.0;
  std::size_t k_samples = 2000;
  SnapshotFormat snapshot_format = SnapshotFormat::Csv;
  bool snapshot_pgm = false;
};

/// Typed view of the store. Throws ConfigError on malformed or invalid values.
RunConfig resolve_config(const ConfigStore& store);

}  // namespace nlturing
