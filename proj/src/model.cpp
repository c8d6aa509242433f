#include "nlturing/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>

namespace nlturing {

namespace {

constexpr double kLeadingTol = 1e-14;

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double flo, double tol = 1e-13) {
  for (int it = 0; it < 200 && (hi - lo) > tol * std::max(1.0, std::abs(lo));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// First sign change of f on a grid, refined by bisection. Grid points where f
// is undefined (NaN) break the bracket.
std::optional<double> first_sign_change(const std::function<double(double)>& f,
                                        const std::vector<double>& grid) {
  double prev_x = 0.0;
  double prev_f = std::numeric_limits<double>::quiet_NaN();
  for (double x : grid) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (!std::isnan(fx) && !std::isnan(prev_f) && (fx < 0.0) != (prev_f < 0.0)) {
      return bisect(f, prev_x, x, prev_f);
    }
    prev_x = x;
    prev_f = fx;
  }
  return std::nullopt;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) /
                            static_cast<double>(n - 1));
  }
  return g;
}

JacobianSummary coexistence_jacobian(double u, double v, const ModelParams& p) {
  JacobianSummary j;
  j.a11 = -p.eta * u / p.kappa;
  j.a12 = -(1.0 + 2.0 * p.alpha * v) * u;
  j.a21 = (1.0 + p.alpha * v) * v;
  j.a22 = p.alpha * u * v;
  j.trace = j.a11 + j.a22;
  j.det = j.a11 * j.a22 - j.a12 * j.a21;
  return j;
}

Stability stability_of(const JacobianSummary& j) {
  if (std::abs(j.det) < kNonHyperbolicTol) return Stability::NonHyperbolic;
  if (j.det < 0.0) return Stability::Saddle;
  if (std::abs(j.trace) < kNonHyperbolicTol) return Stability::NonHyperbolic;
  return j.trace < 0.0 ? Stability::Stable : Stability::Unstable;
}

// Non-saddle interior equilibrium (det > 0) with the smallest prey density.
std::optional<std::pair<double, JacobianSummary>> node_branch(
    const ModelParams& p) {
  for (const auto& e : coexistence_equilibria(p)) {
    const auto j = coexistence_jacobian(e.u_star, e.v_star, p);
    if (j.det > 0.0) return std::make_pair(e.u_star, j);
  }
  return std::nullopt;
}

}  // namespace

void ModelParams::validate(bool spatial) const {
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(eta)) throw std::invalid_argument("eta must be positive");
  if (!positive(kappa)) throw std::invalid_argument("kappa must be positive");
  if (!positive(alpha)) throw std::invalid_argument("alpha must be positive");
  if (spatial && !positive(d)) throw std::invalid_argument("d must be positive");
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw std::invalid_argument("sigma must be non-negative");
  }
}

std::string to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Trivial: return "Trivial";
    case EquilibriumKind::Axial: return "Axial";
    case EquilibriumKind::Coexistence: return "Coexistence";
  }
  return "?";
}

std::string to_string(Stability stability) {
  switch (stability) {
    case Stability::Stable: return "Stable";
    case Stability::Saddle: return "Saddle";
    case Stability::Unstable: return "Unstable";
    case Stability::NonHyperbolic: return "NonHyperbolic";
  }
  return "?";
}

ReactionRates reaction_rates(double u, double v, const ModelParams& p) {
  const double predation = (1.0 + p.alpha * v) * u * v;
  return {p.eta * u * (1.0 - u / p.kappa) - predation, predation - v};
}

JacobianSummary jacobian_at(double u, double v, const ModelParams& p) {
  JacobianSummary j;
  j.a11 = p.eta - 2.0 * p.eta * u / p.kappa - (1.0 + p.alpha * v) * v;
  j.a12 = -u - 2.0 * p.alpha * u * v;
  j.a21 = (1.0 + p.alpha * v) * v;
  j.a22 = u + 2.0 * p.alpha * u * v - 1.0;
  j.trace = j.a11 + j.a22;
  j.det = j.a11 * j.a22 - j.a12 * j.a21;
  return j;
}

CubicRoots cubic_real_roots(double c3, double c2, double c1, double c0,
                            double merge_tol) {
  auto poly = [&](double x) { return ((c3 * x + c2) * x + c1) * x + c0; };
  auto dpoly = [&](double x) { return (3.0 * c3 * x + 2.0 * c2) * x + c1; };

  std::vector<double> raw;
  const double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1),
                                 std::abs(c0)});
  if (scale == 0.0) return {};
  const double a3 = c3 / scale, a2 = c2 / scale, a1 = c1 / scale, a0 = c0 / scale;

  if (std::abs(a3) >= kLeadingTol) {
    using cplx = std::complex<double>;
    const double a = a2 / a3, b = a1 / a3, c = a0 / a3;
    const double pp = b - a * a / 3.0;
    const double qq = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const cplx disc = cplx(qq * qq / 4.0 + pp * pp * pp / 27.0, 0.0);
    const cplx sq = std::sqrt(disc);
    cplx w1 = -qq / 2.0 + sq;
    const cplx w2 = -qq / 2.0 - sq;
    if (std::abs(w2) > std::abs(w1)) w1 = w2;
    const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
    if (std::abs(w1) == 0.0) {
      raw = {-a / 3.0};
    } else {
      cplx cr = std::pow(w1, 1.0 / 3.0);
      for (int k = 0; k < 3; ++k) {
        const cplx t = cr - pp / (3.0 * cr);
        const cplx x = t - a / 3.0;
        if (std::abs(x.imag()) <= 1e-7 * std::max(1.0, std::abs(x.real()))) {
          raw.push_back(x.real());
        }
        cr *= omega;
      }
    }
  } else if (std::abs(a2) >= kLeadingTol) {
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    if (disc >= -1e-14) {
      const double s = std::sqrt(std::max(disc, 0.0));
      const double q = -0.5 * (a1 + std::copysign(s, a1));
      if (q != 0.0) raw.push_back(q / a2);
      if (q != 0.0) raw.push_back(a0 / q);
      else raw.push_back(-a1 / (2.0 * a2));
    }
  } else if (std::abs(a1) >= kLeadingTol) {
    raw.push_back(-a0 / a1);
  }

  for (double& x : raw) {
    for (int it = 0; it < 60; ++it) {
      const double f = poly(x);
      const double df = dpoly(x);
      if (f == 0.0 || df == 0.0) break;
      const double step = f / df;
      const double next = x - step;
      if (std::abs(poly(next)) > std::abs(f)) break;
      x = next;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
  }
  std::sort(raw.begin(), raw.end());

  CubicRoots out;
  for (double x : raw) {
    // A tangency is only resolvable to about sqrt(eps), so a pair whose
    // midpoint is also a root of the derivative counts as one double root.
    const bool tangent = [&] {
      if (out.roots.empty()) return false;
      const double y = out.roots.back(), m = 0.5 * (x + y);
      const double mag = std::max(1.0, std::abs(m));
      const double dscale = 3.0 * std::abs(c3) * mag * mag + 2.0 * std::abs(c2) * mag + std::abs(c1);
      return std::abs(x - y) < 1e-6 * mag && std::abs(dpoly(m)) <= 1e-6 * dscale;
    }();
    if (!out.roots.empty() && (std::abs(x - out.roots.back()) < merge_tol || tangent)) {
      out.roots.back() = 0.5 * (out.roots.back() + x);
      out.merged.back() = true;
      continue;
    }
    out.roots.push_back(x);
    out.merged.push_back(false);
  }
  return out;
}

double equilibrium_cubic(double u, const ModelParams& p) {
  const double ae = p.alpha * p.eta;
  return ((ae * u - ae * p.kappa) * u - p.kappa) * u + p.kappa;
}

double predator_from_prey(double u_star, double alpha) {
  return (1.0 / u_star - 1.0) / alpha;
}

Equilibrium trivial_equilibrium(const ModelParams& p) {
  Equilibrium e{0.0, 0.0, EquilibriumKind::Trivial, Stability::NonHyperbolic};
  e.stability = classify_equilibrium(e, p).stability;
  return e;
}

Equilibrium axial_equilibrium(const ModelParams& p) {
  Equilibrium e{p.kappa, 0.0, EquilibriumKind::Axial, Stability::NonHyperbolic};
  e.stability = classify_equilibrium(e, p).stability;
  return e;
}

std::vector<Equilibrium> coexistence_equilibria(const ModelParams& p) {
  p.validate();
  const double ae = p.alpha * p.eta;
  const auto cubic = cubic_real_roots(ae, -ae * p.kappa, -p.kappa, p.kappa);
  std::vector<Equilibrium> out;
  for (std::size_t i = 0; i < cubic.roots.size(); ++i) {
    const double u = cubic.roots[i];
    if (!(u > 0.0 && u < 1.0)) continue;
    Equilibrium e{u, predator_from_prey(u, p.alpha), EquilibriumKind::Coexistence,
                  Stability::NonHyperbolic};
    e.stability = cubic.merged[i] ? Stability::NonHyperbolic
                                  : classify_equilibrium(e, p).stability;
    out.push_back(e);
  }
  return out;
}

Classification classify_equilibrium(const Equilibrium& e, const ModelParams& p) {
  const JacobianSummary j = e.kind == EquilibriumKind::Coexistence
                                ? coexistence_jacobian(e.u_star, e.v_star, p)
                                : jacobian_at(e.u_star, e.v_star, p);
  return {stability_of(j), j};
}

Equilibrium stable_coexistence(const ModelParams& p) {
  for (const auto& e : coexistence_equilibria(p)) {
    if (e.stability == Stability::Stable) return e;
  }
  throw NumericalError("no temporally stable coexistence equilibrium");
}

double saddle_node_threshold(const ModelParams& p, double u_star) {
  if (!(u_star > 0.0 && u_star <= 1.0)) {
    throw std::domain_error("saddle_node_threshold: u* must lie in (0, 1]");
  }
  return p.kappa * (2.0 - u_star) / (p.alpha * u_star * u_star * u_star);
}

double hopf_threshold(const ModelParams& p, const Equilibrium& e) {
  const auto j = classify_equilibrium(e, p).jacobian;
  if (j.det <= 0.0) {
    throw std::domain_error("hopf_threshold: requires det(J*) > 0");
  }
  return p.eta / (p.kappa * e.v_star);
}

std::optional<FoldPoint> solve_saddle_node(double kappa, double alpha) {
  // Joint system: u is a root of the cubic at eta = eta_SN(u).
  auto residual = [&](double u) {
    ModelParams p{1.0, kappa, alpha};
    p.eta = saddle_node_threshold(p, u);
    return equilibrium_cubic(u, p) / kappa;
  };
  std::vector<double> grid(2001);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = 1e-4 + (1.0 - 2e-4) * static_cast<double>(i) / 2000.0;
  }
  const auto u = first_sign_change(residual, grid);
  if (!u) return std::nullopt;
  ModelParams p{1.0, kappa, alpha};
  const double eta = saddle_node_threshold(p, *u);
  return FoldPoint{eta, *u, predator_from_prey(*u, alpha)};
}

std::optional<HopfPoint> solve_hopf(double eta, double kappa) {
  auto trace_at = [&](double alpha) {
    const auto node = node_branch(ModelParams{eta, kappa, alpha});
    return node ? node->second.trace : std::numeric_limits<double>::quiet_NaN();
  };
  const auto alpha = first_sign_change(trace_at, log_grid(1e-3, 1e4, 1400));
  if (!alpha) return std::nullopt;
  const auto node = node_branch(ModelParams{eta, kappa, *alpha});
  if (!node) return std::nullopt;
  return HopfPoint{*alpha, node->first, predator_from_prey(node->first, *alpha)};
}

std::optional<double> solve_hopf_eta(double kappa, double alpha) {
  auto trace_at = [&](double eta) {
    const auto node = node_branch(ModelParams{eta, kappa, alpha});
    return node ? node->second.trace : std::numeric_limits<double>::quiet_NaN();
  };
  return first_sign_change(trace_at, log_grid(1e-3, 1e3, 1200));
}

std::optional<BogdanovTakensPoint> solve_bogdanov_takens(double kappa) {
  auto trace_at_fold = [&](double alpha) {
    const auto fold = solve_saddle_node(kappa, alpha);
    if (!fold) return std::numeric_limits<double>::quiet_NaN();
    const ModelParams p{fold->eta, kappa, alpha};
    return coexistence_jacobian(fold->u_star, fold->v_star, p).trace;
  };
  const auto alpha = first_sign_change(trace_at_fold, log_grid(1e-3, 1e4, 300));
  if (!alpha) return std::nullopt;
  const auto fold = solve_saddle_node(kappa, *alpha);
  if (!fold) return std::nullopt;
  return BogdanovTakensPoint{*alpha, fold->eta, fold->u_star, fold->v_star};
}

TemporalThresholds temporal_thresholds(const ModelParams& p) {
  p.validate();
  TemporalThresholds t;
  if (auto fold = solve_saddle_node(p.kappa, p.alpha)) t.eta_sn = fold->eta;
  if (auto hopf = solve_hopf(p.eta, p.kappa)) t.alpha_h = hopf->alpha;
  if (auto bt = solve_bogdanov_takens(p.kappa)) t.bt = std::make_pair(bt->alpha, bt->eta);
  return t;
}

double Axis::at(std::size_t i) const {
  if (steps <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

SurfaceScan bifurcation_surface_scan(const Axis& eta, const Axis& kappa,
                                     const Axis& alpha) {
  const std::size_t ne = eta.steps, nk = kappa.steps, na = alpha.steps;
  auto in = [](const Axis& ax, double x) {
    return x >= std::min(ax.lo, ax.hi) && x <= std::max(ax.lo, ax.hi);
  };

  SurfaceScan scan;
  if (in(kappa, 1.0)) {
    for (std::size_t i = 0; i < ne; ++i) {
      for (std::size_t k = 0; k < na; ++k) {
        scan.samples.push_back({eta.at(i), 1.0, alpha.at(k), "TC", 1.0, 0.0});
      }
    }
  }

  // Each cell writes only its own slot, so the result is schedule independent.
  std::vector<std::optional<SurfaceSample>> sn(nk * na);
  std::vector<std::optional<SurfaceSample>> hb(ne * nk);
  std::vector<std::optional<SurfaceSample>> bt(nk);

  const auto n_sn = static_cast<long>(sn.size());
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < n_sn; ++c) {
    const double kp = kappa.at(static_cast<std::size_t>(c) / na);
    const double al = alpha.at(static_cast<std::size_t>(c) % na);
    if (auto fold = solve_saddle_node(kp, al); fold && in(eta, fold->eta)) {
      sn[static_cast<std::size_t>(c)] =
          SurfaceSample{fold->eta, kp, al, "SN", fold->u_star, fold->v_star};
    }
  }

  const auto n_hb = static_cast<long>(hb.size());
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < n_hb; ++c) {
    const double et = eta.at(static_cast<std::size_t>(c) / nk);
    const double kp = kappa.at(static_cast<std::size_t>(c) % nk);
    if (auto h = solve_hopf(et, kp); h && in(alpha, h->alpha)) {
      hb[static_cast<std::size_t>(c)] =
          SurfaceSample{et, kp, h->alpha, "HB", h->u_star, h->v_star};
    }
  }

  const auto n_bt = static_cast<long>(bt.size());
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < n_bt; ++c) {
    const double kp = kappa.at(static_cast<std::size_t>(c));
    if (auto b = solve_bogdanov_takens(kp); b && in(eta, b->eta) && in(alpha, b->alpha)) {
      bt[static_cast<std::size_t>(c)] =
          SurfaceSample{b->eta, kp, b->alpha, "BT", b->u_star, b->v_star};
    }
  }

  for (auto* slots : {&sn, &hb, &bt}) {
    for (auto& s : *slots) {
      if (s) scan.samples.push_back(*s);
      else ++scan.skipped;
    }
  }
  return scan;
}

}  // namespace nlturing
