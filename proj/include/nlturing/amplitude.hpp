#pragma once

#include <array>
#include <string>
#include <vector>

#include "nlturing/dispersion.hpp"
#include "nlturing/model.hpp"

namespace nlturing {

enum class AmplitudeTarget { PreyComponent, PredatorComponent };

/// How h0, m1 and m2 are normalized for the prey component.
///
/// `Published` reproduces the tabulated coefficient values: h0 carries no f1
/// factor, m1 one factor of f1 and m2 two. `Consistent` uses f1 for h0 and
/// f1^2 for both cubic coefficients, which makes them independent of how the
/// critical eigenvector is scaled. The predator component is the same under
/// both settings.
enum class CoefficientScaling { Published, Consistent };

std::string to_string(AmplitudeTarget target);
std::string to_string(CoefficientScaling scaling);

struct WnaCoefficients {
  // Critical eigenvector and adjoint zero-eigenvector, both unit length.
  double f1 = 0.0, g1 = 0.0;
  double f2 = 0.0, g2 = 0.0;
  // Quadratic resonance.
  double F1 = 0.0, G1 = 0.0;
  // Second-order response at zero wavenumber, 2 k_T and sqrt(3) k_T.
  double xi_u0 = 0.0, xi_v0 = 0.0;
  double xi_u1 = 0.0, xi_v1 = 0.0;
  double xi_u2 = 0.0, xi_v2 = 0.0;
  // Cubic resonance.
  double F2 = 0.0, G2 = 0.0, F3 = 0.0, G3 = 0.0, F4 = 0.0, G4 = 0.0;
  // Amplitude-equation coefficients.
  double tau0 = 0.0, h0 = 0.0, m1 = 0.0, m2 = 0.0;
  // Branch thresholds in mu and in d; mu2 = 0, d2 = d_T.
  double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0, mu4 = 0.0;
  double d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0;
  bool thresholds_valid = false;

  TuringPoint turing;
  AmplitudeTarget target = AmplitudeTarget::PreyComponent;
  CoefficientScaling scaling = CoefficientScaling::Published;
};

/// Second- and third-order Taylor coefficients of the local reaction terms
/// at a coexistence state (the density-dependent prey term is excluded; it
/// enters through the kernel).
struct ReactionDerivatives {
  double f20 = 0.0, f11 = 0.0, f02 = 0.0;
  double g20 = 0.0, g11 = 0.0, g02 = 0.0;
  double f30 = 0.0, f21 = 0.0, f12 = 0.0, f03 = 0.0;
  double g30 = 0.0, g21 = 0.0, g12 = 0.0, g03 = 0.0;

  static ReactionDerivatives at(const ModelParams& p, const Equilibrium& e);
};

/// Every amplitude-equation coefficient near the Turing threshold `tp`.
/// Throws NumericalError when an eigenvector normalizer vanishes or a 2x2
/// solve is singular. mu/d thresholds are filled when their preconditions
/// hold (see `thresholds_valid`).
WnaCoefficients wna_coefficients(const ModelParams& p, const Equilibrium& e,
                                 const TuringPoint& tp,
                                 AmplitudeTarget target = AmplitudeTarget::PreyComponent,
                                 CoefficientScaling scaling = CoefficientScaling::Published);

struct MuThresholds {
  double mu1, mu2, mu3, mu4;
  double d1, d2, d3, d4;
};

/// Branch thresholds. Requires m1 > 0, m2 > m1 and m1 + 2 m2 > 0; throws
/// std::domain_error otherwise.
MuThresholds mu_thresholds(const WnaCoefficients& c);

enum class BranchKind { Homogeneous, Stripe, HexH0, HexHpi, Mixed };
std::string to_string(BranchKind kind);

struct MuInterval {
  double lo;
  double hi;
};

struct PatternBranch {
  BranchKind kind;
  std::array<double, 3> amplitude{};
  bool stable = false;
  MuInterval mu_range{};
  /// +1 for the rho+ hexagon, -1 for rho-, 0 otherwise.
  int hex_root = 0;
};

/// Normalized distance to onset, (d_T - d) / d_T.
double normalized_distance(const WnaCoefficients& c, double d);

/// Existing branches at diffusion ratio d with their stability.
/// Requires tau0 > 0.
std::vector<PatternBranch> classify_branches(const WnaCoefficients& c, double d);

/// Branches at a given mu with (tau0, h0, m1, m2) taken from `c`.
std::vector<PatternBranch> branches_at_mu(const WnaCoefficients& c, double mu);

struct AmplitudeState {
  double rho1 = 0.0, rho2 = 0.0, rho3 = 0.0;
  double phi_total = 0.0;
};

/// Right-hand side of the real mode equations (amplitudes and phase sum),
/// already divided by tau0. The phase equation is frozen when any amplitude
/// drops below 1e-12.
AmplitudeState mode_rhs(const WnaCoefficients& c, double mu, const AmplitudeState& s);

/// Right-hand side of the amplitude equations at the stable phase, i.e. with
/// |h0| in the quadratic term, not divided by tau0.
std::array<double, 3> stable_phase_rhs(const WnaCoefficients& c, double mu,
                                       const std::array<double, 3>& rho);

struct ModeTrajectory {
  std::vector<double> time;
  std::vector<AmplitudeState> states;
  bool converged = false;
};

/// Integrates the mode equations with an adaptive Dormand-Prince scheme
/// until the state changes by less than 1e-10 per unit time or `horizon`.
ModeTrajectory integrate_modes(const WnaCoefficients& c, double mu,
                               const AmplitudeState& s0, double horizon);

}  // namespace nlturing
