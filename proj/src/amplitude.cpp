#include "nlturing/amplitude.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nlturing {

namespace {

constexpr double kDetGuard = 1e-12;
constexpr double kPhaseFreeze = 1e-12;

struct Vec2 {
  double x, y;
};

// Solves M z = r for a 2x2 system via the adjugate.
Vec2 solve2(double m11, double m12, double m21, double m22, Vec2 r) {
  const double det = m11 * m22 - m12 * m21;
  if (std::abs(det) < kDetGuard) {
    throw NumericalError("singular 2x2 system in second-order solve");
  }
  return {(m22 * r.x - m12 * r.y) / det, (-m21 * r.x + m11 * r.y) / det};
}

}  // namespace

std::string to_string(AmplitudeTarget target) {
  return target == AmplitudeTarget::PreyComponent ? "prey" : "predator";
}

std::string to_string(CoefficientScaling scaling) {
  return scaling == CoefficientScaling::Published ? "published" : "consistent";
}

std::string to_string(BranchKind kind) {
  switch (kind) {
    case BranchKind::Homogeneous: return "Homogeneous";
    case BranchKind::Stripe: return "Stripe";
    case BranchKind::HexH0: return "HexH0";
    case BranchKind::HexHpi: return "HexHpi";
    case BranchKind::Mixed: return "Mixed";
  }
  return "?";
}

ReactionDerivatives ReactionDerivatives::at(const ModelParams& p,
                                            const Equilibrium& e) {
  ReactionDerivatives r;
  r.f11 = -(1.0 + 2.0 * p.alpha * e.v_star);
  r.f02 = -p.alpha * e.u_star;
  r.g11 = 1.0 + 2.0 * p.alpha * e.v_star;
  r.g02 = p.alpha * e.u_star;
  r.f12 = -p.alpha;
  r.g12 = p.alpha;
  return r;
}

WnaCoefficients wna_coefficients(const ModelParams& p, const Equilibrium& e,
                                 const TuringPoint& tp, AmplitudeTarget target,
                                 CoefficientScaling scaling) {
  const auto lin = LinearizationCoefficients::at(p, e);
  const auto r = ReactionDerivatives::at(p, e);
  const double f10 = lin.a11, f01 = lin.a12, g10 = lin.a21, g01 = lin.a22;
  const double w = lin.nonlocal_weight;
  const double ek = p.eta / p.kappa;
  const double k = tp.k_t, k2 = k * k, dt = tp.d_t;

  // Kernel transform at the three wavenumbers that appear at second order.
  const double psi1 = kernel_fourier(k, p.sigma);
  const double psi2 = kernel_fourier(2.0 * k, p.sigma);
  const double psi3 = kernel_fourier(std::sqrt(3.0) * k, p.sigma);

  const double diag = f10 - w * psi1 - k2;
  const double fc = std::hypot(diag, f01);
  const double gc = std::hypot(diag, g10);
  if (fc < kDetGuard || gc < kDetGuard) {
    throw NumericalError("vanishing eigenvector normalizer");
  }

  WnaCoefficients c;
  c.turing = tp;
  c.target = target;
  c.scaling = scaling;
  c.f1 = -f01 / fc;
  c.g1 = diag / fc;
  c.f2 = -g10 / gc;
  c.g2 = diag / gc;
  const double f1 = c.f1, g1 = c.g1, f2 = c.f2, g2 = c.g2;

  c.F1 = r.f20 * f1 * f1 + r.f11 * f1 * g1 + r.f02 * g1 * g1 - ek * f1 * f1 * psi1;
  c.G1 = r.g20 * f1 * f1 + r.g11 * f1 * g1 + r.g02 * g1 * g1;
  const Vec2 quad{c.F1, c.G1};

  const Vec2 z0 = solve2(f10 - w, f01, g10, g01, quad);
  c.xi_u0 = -2.0 * z0.x;
  c.xi_v0 = -2.0 * z0.y;
  const Vec2 z1 = solve2(f10 - 4.0 * k2 - w * psi2, f01, g10, g01 - 4.0 * dt * k2, quad);
  c.xi_u1 = -z1.x;
  c.xi_v1 = -z1.y;
  const Vec2 z2 = solve2(f10 - 3.0 * k2 - w * psi3, f01, g10, g01 - 3.0 * dt * k2, quad);
  c.xi_u2 = -2.0 * z2.x;
  c.xi_v2 = -2.0 * z2.y;

  c.F4 = f1 * f1 * f1 * r.f30 + f1 * f1 * g1 * r.f21 + f1 * g1 * g1 * r.f12 +
         g1 * g1 * g1 * r.f03;
  c.G4 = f1 * f1 * f1 * r.g30 + f1 * f1 * g1 * r.g21 + f1 * g1 * g1 * r.g12 +
         g1 * g1 * g1 * r.g03;

  // Cubic resonance for self (2k) and cross (sqrt(3) k) interactions.
  auto cubic = [&](double xu, double xv, double psi_harm, double f4_mult) {
    const double su = c.xi_u0 + xu, sv = c.xi_v0 + xv;
    const double f = 2.0 * r.f20 * f1 * su + r.f11 * (f1 * sv + g1 * su) +
                     2.0 * r.f02 * g1 * sv - ek * f1 * (c.xi_u0 + xu * psi_harm) -
                     ek * f1 * su * psi1 + f4_mult * c.F4;
    const double g = 2.0 * r.g20 * f1 * su + r.g11 * (f1 * sv + g1 * su) +
                     2.0 * r.g02 * g1 * sv + f4_mult * c.G4;
    return Vec2{f, g};
  };
  const Vec2 self = cubic(c.xi_u1, c.xi_v1, psi2, 3.0);
  const Vec2 cross = cubic(c.xi_u2, c.xi_v2, psi3, 6.0);
  c.F2 = self.x;
  c.G2 = self.y;
  c.F3 = cross.x;
  c.G3 = cross.y;

  const double den = dt * k2;
  const double s1 = f2 * c.F1 + g2 * c.G1;
  const double s2 = f2 * c.F2 + g2 * c.G2;
  const double s3 = f2 * c.F3 + g2 * c.G3;
  c.tau0 = (f1 * f2 + g1 * g2) / (den * g1 * g2);
  if (target == AmplitudeTarget::PreyComponent) {
    if (scaling == CoefficientScaling::Published) {
      c.h0 = 2.0 * s1 / (den * g1 * g2);
      c.m1 = -s2 / (den * f1 * g1 * g2);
    } else {
      c.h0 = 2.0 * s1 / (den * f1 * g1 * g2);
      c.m1 = -s2 / (den * f1 * f1 * g1 * g2);
    }
    c.m2 = -s3 / (den * f1 * f1 * g1 * g2);
  } else {
    c.h0 = 2.0 * s1 / (den * g1 * g1 * g2);
    c.m1 = -s2 / (den * g1 * g1 * g1 * g2);
    c.m2 = -s3 / (den * g1 * g1 * g1 * g2);
  }

  try {
    const auto t = mu_thresholds(c);
    c.mu1 = t.mu1;
    c.mu2 = t.mu2;
    c.mu3 = t.mu3;
    c.mu4 = t.mu4;
    c.d1 = t.d1;
    c.d2 = t.d2;
    c.d3 = t.d3;
    c.d4 = t.d4;
    c.thresholds_valid = true;
  } catch (const std::domain_error&) {
    c.thresholds_valid = false;
  }
  return c;
}

MuThresholds mu_thresholds(const WnaCoefficients& c) {
  if (!(c.m1 > 0.0 && c.m2 > c.m1 && c.m1 + 2.0 * c.m2 > 0.0)) {
    throw std::domain_error("mu_thresholds: requires m1 > 0, m2 > m1, m1 + 2 m2 > 0");
  }
  const double h2 = c.h0 * c.h0;
  const double gap2 = (c.m2 - c.m1) * (c.m2 - c.m1);
  MuThresholds t;
  t.mu1 = -h2 / (4.0 * (c.m1 + 2.0 * c.m2));
  t.mu2 = 0.0;
  t.mu3 = h2 * c.m1 / gap2;
  t.mu4 = h2 * (2.0 * c.m1 + c.m2) / gap2;
  const double dT = c.turing.d_t;
  t.d1 = (1.0 - t.mu1) * dT;
  t.d2 = dT;
  t.d3 = (1.0 - t.mu3) * dT;
  t.d4 = (1.0 - t.mu4) * dT;
  return t;
}

double normalized_distance(const WnaCoefficients& c, double d) {
  return (c.turing.d_t - d) / c.turing.d_t;
}

std::vector<PatternBranch> branches_at_mu(const WnaCoefficients& c, double mu) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double h = std::abs(c.h0);
  const double m1 = c.m1, m2 = c.m2, msum = m1 + 2.0 * m2;
  const double gap = m2 - m1;

  std::vector<PatternBranch> out;
  out.push_back({BranchKind::Homogeneous, {0.0, 0.0, 0.0}, mu < 0.0, {-inf, inf}, 0});

  if (m1 > 0.0 && mu > 0.0) {
    const double a = std::sqrt(mu / m1);
    const double mu3 = gap != 0.0 ? h * h * m1 / (gap * gap) : inf;
    out.push_back({BranchKind::Stripe, {a, 0.0, 0.0}, gap > 0.0 && mu > mu3, {0.0, inf}, 0});
  }

  if (msum > 0.0) {
    const double mu1 = -h * h / (4.0 * msum);
    const BranchKind hex = c.h0 >= 0.0 ? BranchKind::HexH0 : BranchKind::HexHpi;
    if (mu >= mu1) {
      const double s = std::sqrt(std::max(h * h + 4.0 * msum * mu, 0.0));
      const double plus = (h + s) / (2.0 * msum);
      const double minus = (h - s) / (2.0 * msum);
      const double mu4 = gap != 0.0 ? h * h * (2.0 * m1 + m2) / (gap * gap) : inf;
      if (plus > 0.0) {
        const bool stable = gap <= 0.0 || mu < mu4;
        out.push_back({hex, {plus, plus, plus}, stable, {mu1, inf}, +1});
      }
      if (minus > 0.0 && s > 0.0) {
        out.push_back({hex, {minus, minus, minus}, false, {mu1, 0.0}, -1});
      }
    }
  }

  if (gap > 0.0 && m1 + m2 > 0.0) {
    const double r1 = h / gap;
    const double onset = m1 * r1 * r1;
    if (mu > onset) {
      const double r23 = std::sqrt((mu - onset) / (m1 + m2));
      out.push_back({BranchKind::Mixed, {r1, r23, r23}, false, {onset, inf}, 0});
    }
  }
  return out;
}

std::vector<PatternBranch> classify_branches(const WnaCoefficients& c, double d) {
  if (!(c.tau0 > 0.0)) throw std::domain_error("classify_branches: requires tau0 > 0");
  return branches_at_mu(c, normalized_distance(c, d));
}

AmplitudeState mode_rhs(const WnaCoefficients& c, double mu, const AmplitudeState& s) {
  const double r1 = s.rho1, r2 = s.rho2, r3 = s.rho3;
  const double cphi = std::cos(s.phi_total);
  AmplitudeState out;
  out.rho1 = (mu * r1 + c.h0 * r2 * r3 * cphi - c.m1 * r1 * r1 * r1 -
              c.m2 * (r2 * r2 + r3 * r3) * r1) / c.tau0;
  out.rho2 = (mu * r2 + c.h0 * r1 * r3 * cphi - c.m1 * r2 * r2 * r2 -
              c.m2 * (r1 * r1 + r3 * r3) * r2) / c.tau0;
  out.rho3 = (mu * r3 + c.h0 * r1 * r2 * cphi - c.m1 * r3 * r3 * r3 -
              c.m2 * (r1 * r1 + r2 * r2) * r3) / c.tau0;
  if (std::min({std::abs(r1), std::abs(r2), std::abs(r3)}) < kPhaseFreeze) {
    out.phi_total = 0.0;
  } else {
    const double num = r1 * r1 * r2 * r2 + r2 * r2 * r3 * r3 + r3 * r3 * r1 * r1;
    out.phi_total = -c.h0 * num / (r1 * r2 * r3) * std::sin(s.phi_total) / c.tau0;
  }
  return out;
}

std::array<double, 3> stable_phase_rhs(const WnaCoefficients& c, double mu,
                                       const std::array<double, 3>& rho) {
  const double h = std::abs(c.h0);
  const auto& [r1, r2, r3] = rho;
  return {mu * r1 + h * r2 * r3 - c.m1 * r1 * r1 * r1 - c.m2 * (r2 * r2 + r3 * r3) * r1,
          mu * r2 + h * r1 * r3 - c.m1 * r2 * r2 * r2 - c.m2 * (r1 * r1 + r3 * r3) * r2,
          mu * r3 + h * r1 * r2 - c.m1 * r3 * r3 * r3 - c.m2 * (r1 * r1 + r2 * r2) * r3};
}

ModeTrajectory integrate_modes(const WnaCoefficients& c, double mu,
                               const AmplitudeState& s0, double horizon) {
  if (!(c.tau0 > 0.0)) throw std::domain_error("integrate_modes: requires tau0 > 0");
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 4>;

  auto pack = [](const AmplitudeState& s) {
    return State{s.rho1, s.rho2, s.rho3, s.phi_total};
  };
  auto unpack = [](const State& x) { return AmplitudeState{x[0], x[1], x[2], x[3]}; };
  auto system = [&](const State& x, State& dxdt, double) {
    dxdt = pack(mode_rhs(c, mu, unpack(x)));
  };
  // A negative amplitude is the same mode with its phase shifted by pi.
  auto canonicalize = [](State& x) {
    for (int i = 0; i < 3; ++i) {
      if (x[i] < 0.0) {
        x[i] = -x[i];
        x[3] += std::numbers::pi;
      }
    }
    x[3] = std::remainder(x[3], 2.0 * std::numbers::pi);
  };

  auto stepper = odeint::make_controlled(1e-9, 1e-9, odeint::runge_kutta_dopri5<State>());
  State x = pack(s0);
  canonicalize(x);
  double t = 0.0;
  double h = 1e-2;

  ModeTrajectory traj;
  traj.time.push_back(t);
  traj.states.push_back(unpack(x));
  while (t < horizon) {
    h = std::min(h, horizon - t);
    if (stepper.try_step(system, x, t, h) != odeint::success) continue;
    canonicalize(x);
    traj.time.push_back(t);
    traj.states.push_back(unpack(x));

    State dx;
    system(x, dx, t);
    const double rate = std::max({std::abs(dx[0]), std::abs(dx[1]), std::abs(dx[2]),
                                  std::abs(dx[3])});
    if (rate < 1e-10) {
      traj.converged = true;
      break;
    }
  }
  return traj;
}

}  // namespace nlturing
