#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlturing {

/// Raised when an iterative solver fails or a field goes non-finite.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Prey growth rate, carrying capacity, hunting cooperation, predator
/// diffusion ratio and Gaussian kernel width (sigma = 0 is the local model).
struct ModelParams {
  double eta = 0.92;
  double kappa = 0.65;
  double alpha = 10.0;
  double d = 1.0;
  double sigma = 0.0;

  /// Throws std::invalid_argument when a parameter is out of its domain.
  /// `spatial` additionally requires d > 0.
  void validate(bool spatial = false) const;
};

enum class EquilibriumKind { Trivial, Axial, Coexistence };
enum class Stability { Stable, Saddle, Unstable, NonHyperbolic };

std::string to_string(EquilibriumKind kind);
std::string to_string(Stability stability);

struct Equilibrium {
  double u_star = 0.0;
  double v_star = 0.0;
  EquilibriumKind kind = EquilibriumKind::Coexistence;
  Stability stability = Stability::NonHyperbolic;
};

struct JacobianSummary {
  double a11 = 0.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;
  double trace = 0.0;
  double det = 0.0;
};

struct Classification {
  Stability stability;
  JacobianSummary jacobian;
};

struct TemporalThresholds {
  double kappa_tc = 1.0;
  std::optional<double> eta_sn;
  std::optional<double> alpha_h;
  /// (alpha_bt, eta_bt) for the same kappa.
  std::optional<std::pair<double, double>> bt;
};

inline constexpr double kNonHyperbolicTol = 1e-10;
inline constexpr double kRootMergeTol = 1e-9;

struct ReactionRates {
  double du_dt;
  double dv_dt;
};

/// Right-hand side of the kinetic system: prey logistic growth minus
/// cooperative predation, and predator conversion minus mortality.
ReactionRates reaction_rates(double u, double v, const ModelParams& p);

/// Jacobian of the kinetic system at an arbitrary state.
JacobianSummary jacobian_at(double u, double v, const ModelParams& p);

/// Real roots of c3 x^3 + c2 x^2 + c1 x + c0, ascending, Newton-polished.
/// Leading coefficients with magnitude below 1e-14 reduce the degree.
/// Roots closer than `merge_tol` are merged; `merged` reports whether that
/// happened (a tangency).
struct CubicRoots {
  std::vector<double> roots;
  std::vector<bool> merged;
};
CubicRoots cubic_real_roots(double c3, double c2, double c1, double c0,
                            double merge_tol = kRootMergeTol);

/// phi(u) = alpha eta u^3 - alpha kappa eta u^2 - kappa u + kappa.
double equilibrium_cubic(double u, const ModelParams& p);

/// Predator density on the predator nullcline for a given prey density.
double predator_from_prey(double u_star, double alpha);

Equilibrium trivial_equilibrium(const ModelParams& p);
Equilibrium axial_equilibrium(const ModelParams& p);

/// All interior equilibria (0 < u* < 1), ascending in u*, classified.
std::vector<Equilibrium> coexistence_equilibria(const ModelParams& p);

Classification classify_equilibrium(const Equilibrium& e, const ModelParams& p);

/// The unique temporally stable coexistence point. Throws NumericalError if
/// none of the coexistence points is stable.
Equilibrium stable_coexistence(const ModelParams& p);

/// eta at which det(J*) vanishes for the given interior prey density.
double saddle_node_threshold(const ModelParams& p, double u_star);

/// alpha at which trace(J*) vanishes with v* held fixed: eta / (kappa v*).
/// Throws std::domain_error if det(J*) <= 0.
double hopf_threshold(const ModelParams& p, const Equilibrium& e);

struct FoldPoint {
  double eta;
  double u_star;
  double v_star;
};

/// Self-consistent saddle-node point in eta for fixed (kappa, alpha).
std::optional<FoldPoint> solve_saddle_node(double kappa, double alpha);

struct HopfPoint {
  double alpha;
  double u_star;
  double v_star;
};

/// Self-consistent Hopf point in alpha for fixed (eta, kappa), located on the
/// coexistence branch where det(J*) > 0.
std::optional<HopfPoint> solve_hopf(double eta, double kappa);

/// Self-consistent Hopf point in eta for fixed (kappa, alpha).
std::optional<double> solve_hopf_eta(double kappa, double alpha);

struct BogdanovTakensPoint {
  double alpha;
  double eta;
  double u_star;
  double v_star;
};

/// Codimension-two point for fixed kappa where trace and det vanish together.
std::optional<BogdanovTakensPoint> solve_bogdanov_takens(double kappa);

TemporalThresholds temporal_thresholds(const ModelParams& p);

struct Axis {
  double lo;
  double hi;
  std::size_t steps;
  double at(std::size_t i) const;
};

struct SurfaceSample {
  double eta;
  double kappa;
  double alpha;
  std::string surface;  // TC, SN, HB or BT
  double u_star;
  double v_star;
};

struct SurfaceScan {
  std::vector<SurfaceSample> samples;
  std::size_t skipped = 0;
};

/// Samples the transcritical plane, saddle-node and Hopf surfaces and the
/// Bogdanov-Takens curve inside a box. Cells are evaluated in parallel; the
/// output is ordered by surface, then lexicographically by grid index.
SurfaceScan bifurcation_surface_scan(const Axis& eta, const Axis& kappa,
                                     const Axis& alpha);

}  // namespace nlturing
