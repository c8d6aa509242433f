#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nlturing/amplitude.hpp"
#include "nlturing/config.hpp"
#include "nlturing/dispersion.hpp"
#include "nlturing/manifest.hpp"
#include "nlturing/model.hpp"
#include "nlturing/pattern.hpp"
#include "nlturing/simulation.hpp"
#include "nlturing/snapshot_io.hpp"

namespace fs = std::filesystem;
using namespace nlturing;

namespace {

using Cell = std::variant<double, long long, std::string>;

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw std::logic_error("row width mismatch");
    rows_.push_back(std::move(row));
  }
  std::size_t size() const { return rows_.size(); }

  void write(const fs::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << join(header_) << '\n';
    for (const auto& r : rows_) {
      std::vector<std::string> cells;
      for (const auto& c : r) cells.push_back(exact(c));
      out << join(cells) << '\n';
    }
  }

  void print_pretty(std::ostream& os) const {
    std::vector<std::vector<std::string>> text{header_};
    for (const auto& r : rows_) {
      std::vector<std::string> cells;
      for (const auto& c : r) cells.push_back(rounded(c));
      text.push_back(std::move(cells));
    }
    std::vector<std::size_t> width(header_.size(), 0);
    for (const auto& r : text) {
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    for (const auto& r : text) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        os << (i ? "  " : "") << std::string(width[i] - r[i].size(), ' ') << r[i];
      }
      os << '\n';
    }
  }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
  }
  static std::string exact(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
  }
  static std::string rounded(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", *d);
      return buf;
    }
    return exact(c);
  }

  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

struct Context {
  std::string command;
  ConfigStore store;
  RunConfig rc;
  fs::path out_dir;
  bool pretty = false;
  std::vector<fs::path> files;

  void emit(const Table& t, const std::string& name) {
    const auto path = out_dir / name;
    t.write(path);
    files.push_back(path);
    if (pretty && t.size() <= 60) {
      std::cout << "# " << name << '\n';
      t.print_pretty(std::cout);
    }
  }

  void finish() {
    const auto m = make_manifest(command, store.canonical_text(), rc.sim.seed, out_dir, files);
    write_manifest(m);
    std::cout << "manifest," << (out_dir / "manifest.json").string() << '\n';
  }
};

Cell opt_cell(const std::optional<double>& x) {
  return x ? Cell{*x} : Cell{std::string()};
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

// --- subcommands -----------------------------------------------------------

void cmd_equilibria(Context& ctx) {
  const ModelParams& p = ctx.rc.sim.params;
  Table boundary({"kind", "u_star", "v_star", "stability", "trace", "det"});
  for (const auto& e : {trivial_equilibrium(p), axial_equilibrium(p)}) {
    const auto c = classify_equilibrium(e, p);
    boundary.add({to_string(e.kind), e.u_star, e.v_star, to_string(c.stability),
                  c.jacobian.trace, c.jacobian.det});
  }
  Table coexist({"u_star", "v_star", "stability", "trace", "det"});
  for (const auto& e : coexistence_equilibria(p)) {
    const auto c = classify_equilibrium(e, p);
    coexist.add({e.u_star, e.v_star, to_string(e.stability), c.jacobian.trace, c.jacobian.det});
  }
  // Non-trivial nullclines as u(v): prey u = kappa (1 - (1 + alpha v) v / eta),
  // predator u = 1 / (1 + alpha v). Sampled up to where the prey branch hits u = 0.
  Table null({"v", "u_prey_nullcline", "u_predator_nullcline"});
  const double v_end = (-1.0 + std::sqrt(1.0 + 4.0 * p.alpha * p.eta)) / (2.0 * p.alpha);
  constexpr int kSamples = 400;
  for (int i = 0; i <= kSamples; ++i) {
    const double v = v_end * i / kSamples;
    null.add({v, p.kappa * (1.0 - (1.0 + p.alpha * v) * v / p.eta), 1.0 / (1.0 + p.alpha * v)});
  }
  ctx.emit(coexist, "equilibria.csv");
  ctx.emit(boundary, "boundary_equilibria.csv");
  ctx.emit(null, "nullclines.csv");

  const auto th = temporal_thresholds(p);
  Table thresholds({"kappa_tc", "eta_sn", "alpha_h", "alpha_bt", "eta_bt"});
  thresholds.add({th.kappa_tc, opt_cell(th.eta_sn), opt_cell(th.alpha_h),
                  th.bt ? Cell{th.bt->first} : Cell{std::string()},
                  th.bt ? Cell{th.bt->second} : Cell{std::string()}});
  ctx.emit(thresholds, "temporal_thresholds.csv");
  std::cout << "coexistence_count," << coexist.size() << '\n';
}

void cmd_surface_scan(Context& ctx) {
  const auto scan = bifurcation_surface_scan(ctx.rc.eta_axis, ctx.rc.kappa_axis, ctx.rc.alpha_axis);
  Table t({"eta", "kappa", "alpha", "surface", "u_star", "v_star"});
  for (const auto& s : scan.samples) t.add({s.eta, s.kappa, s.alpha, s.surface, s.u_star, s.v_star});
  ctx.emit(t, "surface.csv");
  std::cout << "samples," << scan.samples.size() << "\nskipped," << scan.skipped << '\n';
}

TuringSearch search_of(const RunConfig& rc) { return {1e-4, rc.k_max, rc.k_samples}; }

void cmd_turing(Context& ctx) {
  const ModelParams& p = ctx.rc.sim.params;
  const auto e = stable_coexistence(p);
  const auto tp = turing_threshold(p, e, search_of(ctx.rc));
  Table t({"eta", "kappa", "alpha", "sigma", "u_star", "v_star", "k_t", "d_t"});
  t.add({p.eta, p.kappa, p.alpha, p.sigma, e.u_star, e.v_star, tp.k_t, tp.d_t});
  ctx.emit(t, "turing.csv");

  Table disp({"k", "trace", "det", "re_lambda_plus", "im_lambda_plus", "re_lambda_minus",
              "im_lambda_minus"});
  const auto& s = search_of(ctx.rc);
  for (std::size_t i = 0; i < s.samples; ++i) {
    const double k = s.k_min + (s.k_max - s.k_min) * static_cast<double>(i) /
                                   static_cast<double>(s.samples - 1);
    const auto w = dispersion_sample(k, p, e);
    disp.add({k, w.trace_k, w.det_k, w.lambda_plus.real(), w.lambda_plus.imag(),
              w.lambda_minus.real(), w.lambda_minus.imag()});
  }
  ctx.emit(disp, "dispersion.csv");
  std::cout << "k_t," << format_double(tp.k_t) << "\nd_t," << format_double(tp.d_t) << '\n';
}

void cmd_turing_curve(Context& ctx) {
  const ModelParams& p = ctx.rc.sim.params;
  std::vector<double> etas;
  for (std::size_t i = 0; i < ctx.rc.eta_axis.steps; ++i) etas.push_back(ctx.rc.eta_axis.at(i));
  Table t({"eta", "sigma", "k_t", "d_t"});
  std::size_t failed = 0;
  for (double sigma : ctx.rc.sigma_list) {
    const auto curve = turing_curve(etas, p.kappa, p.alpha, sigma);
    for (const auto& pt : curve.points) t.add({pt.eta, pt.sigma, pt.k_t, pt.d_t});
    failed += curve.failed_eta.size();
  }
  ctx.emit(t, "turing_curve.csv");
  Table hopf({"kappa", "alpha", "eta_h"});
  if (const auto eh = solve_hopf_eta(p.kappa, p.alpha)) hopf.add({p.kappa, p.alpha, *eh});
  ctx.emit(hopf, "hopf_line.csv");
  std::cout << "points," << t.size() << "\nfailed," << failed << '\n';
}

Cell threshold_cell(const WnaCoefficients& c, double x) {
  return c.thresholds_valid ? Cell{x} : Cell{std::string()};
}

void cmd_wna_table(Context& ctx) {
  ModelParams p = ctx.rc.sim.params;
  Table table({"sigma", "d_t", "k_t", "f1", "g1", "m1", "m2", "h0", "tau0", "d3", "d4"});
  Table ext({"sigma", "target", "scaling", "d_t", "k_t", "f1", "g1", "f2", "g2", "F1", "G1",
             "xi_u0", "xi_v0", "xi_u1", "xi_v1", "xi_u2", "xi_v2", "F2", "G2", "F3", "G3", "F4",
             "G4", "tau0", "h0", "m1", "m2", "mu1", "mu2", "mu3", "mu4", "d1", "d2", "d3", "d4",
             "thresholds_valid", "h0_negative"});
  const std::vector<std::pair<AmplitudeTarget, CoefficientScaling>> variants = {
      {AmplitudeTarget::PreyComponent, CoefficientScaling::Published},
      {AmplitudeTarget::PreyComponent, CoefficientScaling::Consistent},
      {AmplitudeTarget::PredatorComponent, CoefficientScaling::Published}};
  for (double sigma : ctx.rc.sigma_list) {
    p.sigma = sigma;
    const auto e = stable_coexistence(p);
    const auto tp = turing_threshold(p, e, search_of(ctx.rc));
    for (const auto& [target, scaling] : variants) {
      const auto c = wna_coefficients(p, e, tp, target, scaling);
      if (target == AmplitudeTarget::PreyComponent && scaling == CoefficientScaling::Published) {
        table.add({sigma, tp.d_t, tp.k_t, c.f1, c.g1, c.m1, c.m2, c.h0, c.tau0,
                   threshold_cell(c, c.d3), threshold_cell(c, c.d4)});
      }
      ext.add({sigma, to_string(target), to_string(scaling), tp.d_t, tp.k_t, c.f1, c.g1, c.f2,
               c.g2, c.F1, c.G1, c.xi_u0, c.xi_v0, c.xi_u1, c.xi_v1, c.xi_u2, c.xi_v2, c.F2,
               c.G2, c.F3, c.G3, c.F4, c.G4, c.tau0, c.h0, c.m1, c.m2,
               threshold_cell(c, c.mu1), threshold_cell(c, c.mu2), threshold_cell(c, c.mu3),
               threshold_cell(c, c.mu4), threshold_cell(c, c.d1), threshold_cell(c, c.d2),
               threshold_cell(c, c.d3), threshold_cell(c, c.d4), yes_no(c.thresholds_valid),
               yes_no(c.h0 < 0.0)});
    }
  }
  ctx.emit(table, "wna_table.csv");
  ctx.emit(ext, "wna_extended.csv");
}

void add_branch_rows(Table& t, const std::vector<PatternBranch>& bs, double mu, double d) {
  for (const auto& b : bs) {
    t.add({mu, d, to_string(b.kind), static_cast<long long>(b.hex_root), b.amplitude[0],
           b.amplitude[1], b.amplitude[2], yes_no(b.stable), b.mu_range.lo, b.mu_range.hi});
  }
}

void cmd_branches(Context& ctx) {
  const ModelParams& p = ctx.rc.sim.params;
  const auto e = stable_coexistence(p);
  const auto tp = turing_threshold(p, e, search_of(ctx.rc));
  const auto c = wna_coefficients(p, e, tp);
  const std::vector<std::string> header = {"mu", "d", "kind", "hex_root", "rho1", "rho2",
                                           "rho3", "stable", "mu_lo", "mu_hi"};
  Table here(header);
  add_branch_rows(here, classify_branches(c, p.d), normalized_distance(c, p.d), p.d);
  ctx.emit(here, "branches.csv");

  Table diagram(header);
  const Axis mu{ctx.rc.mu_min, ctx.rc.mu_max, ctx.rc.mu_steps};
  for (std::size_t i = 0; i < mu.steps; ++i) {
    const double m = mu.at(i);
    add_branch_rows(diagram, branches_at_mu(c, m), m, (1.0 - m) * tp.d_t);
  }
  ctx.emit(diagram, "branch_diagram.csv");
  std::cout << "mu," << format_double(normalized_distance(c, p.d)) << '\n';
}

Table classification_table() {
  return Table({"time", "class", "dominant_k", "angular_peaks", "power_fraction", "skewness",
                "uv_correlation"});
}

void add_classification(Table& t, const FieldPair& s, const Grid2D& g,
                        const PatternThresholds& th) {
  const auto sum = spectral_summary(s.u, g, th);
  Cell corr = std::string();
  try {
    corr = cross_correlation(s.u, s.v);
  } catch (const std::invalid_argument&) {
    // homogeneous fields have no correlation
  }
  t.add({s.time, to_string(classify_pattern(s.u, g, th)), sum.dominant_k,
         static_cast<long long>(sum.angular_peaks), sum.power_fraction, sum.skewness, corr});
}

void cmd_simulate(Context& ctx) {
  const auto& rc = ctx.rc;
  const auto e = stable_coexistence(rc.sim.params);
  SnapshotWriter writer(ctx.out_dir / "snapshots", rc.snapshot_format, rc.snapshot_pgm);
  Table cls = classification_table();
  auto observe = [&](const FieldPair& s) {
    writer.write(s);
    add_classification(cls, s, rc.sim.grid, rc.thresholds);
  };
  const auto result = run_to_steady(rc.sim, e, observe);
  if (rc.sim.snapshot_interval <= 0.0) observe(result.final_state);
  ctx.files.insert(ctx.files.end(), writer.files().begin(), writer.files().end());
  ctx.emit(cls, "classification.csv");

  const auto& f = result.final_state;
  Table summary({"converged", "steps", "final_time", "class_u", "class_v", "uv_correlation",
                 "worst_negative_mass"});
  Cell corr = std::string();
  try {
    corr = cross_correlation(f.u, f.v);
  } catch (const std::invalid_argument&) {
  }
  summary.add({yes_no(result.converged), static_cast<long long>(result.steps), f.time,
               to_string(classify_pattern(f.u, rc.sim.grid, rc.thresholds)),
               to_string(classify_pattern(f.v, rc.sim.grid, rc.thresholds)), corr,
               result.worst_negative_mass});
  ctx.emit(summary, "summary.csv");
  if (result.negative_mass_flag) {
    std::cerr << "warning: negative densities reached a mass fraction of "
              << result.worst_negative_mass << '\n';
  }
  summary.print_pretty(std::cout);
}

Field2D load_field(const fs::path& path) {
  return path.extension() == ".raw" ? read_field_raw(path) : read_field_csv(path);
}

void cmd_classify(Context& ctx, const fs::path& u_path, const fs::path& v_path) {
  Grid2D g = ctx.rc.sim.grid;
  FieldPair s{load_field(u_path), {}, 0.0};
  if (s.u.nx != g.nx || s.u.ny != g.ny) {
    throw ConfigError("field is " + std::to_string(s.u.nx) + "x" + std::to_string(s.u.ny) +
                      " but the grid is " + std::to_string(g.nx) + "x" + std::to_string(g.ny));
  }
  s.v = v_path.empty() ? s.u : load_field(v_path);
  if (s.v.nx != s.u.nx || s.v.ny != s.u.ny) throw ConfigError("u and v shapes differ");
  Table cls = classification_table();
  add_classification(cls, s, g, ctx.rc.thresholds);
  if (v_path.empty()) {
    Table only = classification_table();
    const auto sum = spectral_summary(s.u, g, ctx.rc.thresholds);
    only.add({0.0, to_string(classify_pattern(s.u, g, ctx.rc.thresholds)), sum.dominant_k,
              static_cast<long long>(sum.angular_peaks), sum.power_fraction, sum.skewness,
              std::string()});
    cls = only;
  }
  ctx.emit(cls, "classification.csv");
  cls.print_pretty(std::cout);
}

fs::path default_output_dir() {
  if (const char* env = std::getenv("NLTURING_OUTPUT_DIR"); env && *env) return env;
  return "nlturing-out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal prey-predator model with hunting cooperation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool pretty = false;
  app.add_option("--config", config_path, "key = value file with [model] [grid] [time] [analysis]")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default: $NLTURING_OUTPUT_DIR or ./nlturing-out)");
  app.add_flag("--pretty", pretty, "also print rounded tables");

  std::map<std::string, std::string> overrides;
  for (const auto& key : config_schema()) {
    app.add_option_function<std::string>(
        "--" + key.name, [&overrides, name = key.name](const std::string& v) { overrides[name] = v; },
        key.help + " [" + key.section + "] (default " + key.default_value + ")");
  }

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"equilibria", "equilibria, their stability and the nullclines"},
      {"surface-scan", "TC, SN, Hopf and BT samples over the configured box"},
      {"turing", "Turing threshold and the dispersion relation at d"},
      {"turing-curve", "Turing thresholds over the eta axis for each sigma"},
      {"wna-table", "amplitude-equation coefficients for each sigma"},
      {"branches", "pattern branches and their stability"},
      {"simulate", "2-D simulation to a steady state"},
      {"classify", "classify stored u (and v) fields"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    subs[name] = app.add_subcommand(name, help);
    subs[name]->fallthrough();
  }
  std::string u_file, v_file;
  subs["classify"]->add_option("--u-field", u_file, "prey field (.csv or .raw)")->required();
  subs["classify"]->add_option("--v-field", v_file, "predator field (.csv or .raw)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  Context ctx;
  ctx.pretty = pretty;
  try {
    if (!config_path.empty()) ctx.store.load_file(config_path);
    for (const auto& [k, v] : overrides) ctx.store.set(k, v);
    ctx.rc = resolve_config(ctx.store);
    ctx.out_dir = out_dir.empty() ? default_output_dir() : fs::path(out_dir);
    fs::create_directories(ctx.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  }

  try {
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      ctx.command = name;
      if (name == "equilibria") cmd_equilibria(ctx);
      else if (name == "surface-scan") cmd_surface_scan(ctx);
      else if (name == "turing") cmd_turing(ctx);
      else if (name == "turing-curve") cmd_turing_curve(ctx);
      else if (name == "wna-table") cmd_wna_table(ctx);
      else if (name == "branches") cmd_branches(ctx);
      else if (name == "simulate") cmd_simulate(ctx);
      else if (name == "classify") cmd_classify(ctx, u_file, v_file);
    }
    ctx.finish();
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
