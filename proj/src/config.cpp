#include "nlturing/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <sstream>

namespace nlturing {

namespace {

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

const ConfigKey* find_key(const std::string& name) {
  for (const auto& k : config_schema()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  try {
    std::size_t used = 0;
    const double x = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": '" + text + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid non-negative integer for " + key + ": '" + text + "'");
  }
  return x;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

Axis parse_axis(const std::string& key, const std::string& text) {
  const auto v = parse_list(key, text);
  if (v.size() != 3 || v[2] < 1.0 || v[2] != std::floor(v[2])) {
    throw ConfigError(key + " must be 'lo, hi, steps' with integer steps >= 1");
  }
  if (!(v[1] >= v[0])) throw ConfigError(key + ": hi must be >= lo");
  return Axis{v[0], v[1], static_cast<std::size_t>(v[2])};
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"model", "eta", "0.92", "prey growth rate"},
      {"model", "kappa", "0.65", "carrying capacity"},
      {"model", "alpha", "10", "hunting cooperation"},
      {"model", "d", "0.271", "predator diffusion ratio"},
      {"model", "sigma", "0", "kernel width"},
      {"grid", "nx", "200", "cells along x"},
      {"grid", "ny", "200", "cells along y"},
      {"grid", "dx", "0.25", "spacing along x"},
      {"grid", "dy", "0.25", "spacing along y"},
      {"time", "dt", "0.01", "Euler step"},
      {"time", "t_max", "5000", "final time"},
      {"time", "snapshot_interval", "0", "snapshot spacing, 0 = final state only"},
      {"time", "steady_tol", "1e-6", "per-unit-time max-norm change for steadiness"},
      {"time", "steady_window", "100", "time the change must stay below steady_tol"},
      {"analysis", "seed", "20240601", "noise seed"},
      {"analysis", "perturbation_amplitude", "0", "noise amplitude, 0 = 1e-2 u*"},
      {"analysis", "convolution", "spectral", "spectral or direct"},
      {"analysis", "threads", "parallel", "serial or parallel kernels"},
      {"analysis", "snapshot_format", "csv", "csv or raw"},
      {"analysis", "snapshot_pgm", "false", "also write PGM images"},
      {"analysis", "sigma_list", "0,0.25,0.5,0.75,1,1.25,1.5", "kernel widths for tables"},
      {"analysis", "eta_axis", "0.7,1.2,51", "eta range: lo, hi, steps"},
      {"analysis", "kappa_axis", "0.3,1.5,25", "kappa range: lo, hi, steps"},
      {"analysis", "alpha_axis", "0.5,20,40", "alpha range: lo, hi, steps"},
      {"analysis", "mu_range", "-0.02,0.2,200", "branch diagram: lo, hi, steps"},
      {"analysis", "k_max", "10", "upper wavenumber for dispersion scans"},
      {"analysis", "k_samples", "2000", "dispersion scan samples"},
      {"analysis", "power_fraction", "0.05", "homogeneous ring-power threshold"},
      {"analysis", "relative_range", "1e-4", "homogeneous range threshold"},
      {"analysis", "skewness", "0.2", "hot/cold spot skewness threshold"},
      {"analysis", "ring_peak_fraction", "0.5", "angular peak threshold"},
      {"analysis", "peak_separation_deg", "15", "minimum angular peak separation"},
  };
  return schema;
}

ConfigStore::ConfigStore() {
  for (const auto& k : config_schema()) values_[k.name] = k.default_value;
}

void ConfigStore::load_file(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' outside of a section");
    }
    for (const auto& [name, value] : body) {
      const ConfigKey* key = find_key(name);
      if (!key) throw ConfigError("unknown key '" + section + "." + name + "'");
      if (key->section != section) {
        throw ConfigError("key '" + name + "' belongs in [" + key->section + "], not [" +
                          section + "]");
      }
      values_[name] = trim(value.data());
    }
  }
}

void ConfigStore::set(const std::string& name, const std::string& value) {
  if (!find_key(name)) throw ConfigError("unknown key '" + name + "'");
  values_[name] = trim(value);
}

const std::string& ConfigStore::get(const std::string& name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) throw ConfigError("unknown key '" + name + "'");
  return it->second;
}

std::string ConfigStore::canonical_text() const {
  std::string out;
  for (const auto& k : config_schema()) {
    out += k.section + "." + k.name + " = " + values_.at(k.name) + "\n";
  }
  return out;
}

RunConfig resolve_config(const ConfigStore& s) {
  auto num = [&](const char* key) { return parse_double(key, s.get(key)); };
  auto uint = [&](const char* key) { return parse_uint(key, s.get(key)); };

  RunConfig rc;
  auto& p = rc.sim.params;
  p.eta = num("eta");
  p.kappa = num("kappa");
  p.alpha = num("alpha");
  p.d = num("d");
  p.sigma = num("sigma");
  rc.sim.grid = Grid2D{uint("nx"), uint("ny"), num("dx"), num("dy")};
  rc.sim.dt = num("dt");
  rc.sim.t_max = num("t_max");
  rc.sim.snapshot_interval = num("snapshot_interval");
  rc.sim.steady_tol = num("steady_tol");
  rc.sim.steady_window = num("steady_window");
  rc.sim.seed = uint("seed");
  rc.sim.perturbation_amplitude = num("perturbation_amplitude");

  const std::string conv = trim(s.get("convolution"));
  if (conv == "spectral") rc.sim.convolution_path = ConvolutionPath::Spectral;
  else if (conv == "direct") rc.sim.convolution_path = ConvolutionPath::DirectQuadrature;
  else throw ConfigError("convolution must be 'spectral' or 'direct'");

  const std::string threads = trim(s.get("threads"));
  if (threads == "parallel") rc.sim.policy = ExecutionPolicy::Parallel;
  else if (threads == "serial") rc.sim.policy = ExecutionPolicy::Serial;
  else throw ConfigError("threads must be 'serial' or 'parallel'");

  const std::string fmt = trim(s.get("snapshot_format"));
  if (fmt == "csv") rc.snapshot_format = SnapshotFormat::Csv;
  else if (fmt == "raw") rc.snapshot_format = SnapshotFormat::Raw;
  else throw ConfigError("snapshot_format must be 'csv' or 'raw'");
  rc.snapshot_pgm = parse_bool("snapshot_pgm", s.get("snapshot_pgm"));

  rc.sigma_list = parse_list("sigma_list", s.get("sigma_list"));
  rc.eta_axis = parse_axis("eta_axis", s.get("eta_axis"));
  rc.kappa_axis = parse_axis("kappa_axis", s.get("kappa_axis"));
  rc.alpha_axis = parse_axis("alpha_axis", s.get("alpha_axis"));
  const Axis mu = parse_axis("mu_range", s.get("mu_range"));
  rc.mu_min = mu.lo;
  rc.mu_max = mu.hi;
  rc.mu_steps = mu.steps;
  rc.k_max = num("k_max");
  rc.k_samples = uint("k_samples");
  if (!(rc.k_max > 1e-4) || rc.k_samples < 2) {
    throw ConfigError("k_max must exceed 1e-4 and k_samples must be >= 2");
  }

  rc.thresholds.power_fraction = num("power_fraction");
  rc.thresholds.relative_range = num("relative_range");
  rc.thresholds.skewness = num("skewness");
  rc.thresholds.ring_peak_fraction = num("ring_peak_fraction");
  rc.thresholds.min_peak_separation_deg = num("peak_separation_deg");

  for (double sg : rc.sigma_list) {
    if (!(sg >= 0.0)) throw ConfigError("sigma_list entries must be >= 0");
  }
  try {
    p.validate(true);
    rc.sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

}  // namespace nlturing
