#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dnf/grid.hpp"

namespace dnf {

// Local space-time energy of a trajectory on a parabolic cylinder: mean
// square oscillation of v_t and D^2 v plus the r-scaled oscillation of Dv
// corrected by its own affine model (D^2 v)_Q (y - x).
struct LocalEnergySample {
  ParabolicCylinder cyl;
  double T1 = 0.0;
  double T2 = 0.0;
  double T3 = 0.0;
  double E() const { return T1 + T2 + T3; }
};

LocalEnergySample local_energy(const TrajectoryAnalytics& an, const ParabolicCylinder& cyl);

// Derived iteration thresholds. From user-chosen (L, gamma, epsilon, rho,
// vartheta) the entry threshold epsilon1, the radius ceiling rho1 and the
// decay rate mu are fixed by closed formulas; mu < alpha/2 < gamma always.
struct DecayParams {
  double L = 10.0;
  double gamma = 0.75;
  double epsilon = 0.1;
  double rho = 0.5;
  double vartheta = 0.25;
  double alpha = 1.0;
  int n = 1;
  // derived
  double epsilon1 = 0.0;
  double rho1 = 0.0;
  double mu = 0.0;
};

// Validates the parameter windows and computes the derived quantities:
//   epsilon1 = min(epsilon, vartheta^{n/2+1} L / 8)
//   rho1     = min(rho, (vartheta^{2(n+3)} epsilon1^2 / (24 L))^{1/(2 gamma)})
//   mu       = (1/2) log(1/2) / log(vartheta).
// vartheta and gamma live in strictly open windows ((0,(1/2)^{1/alpha}) and
// (alpha/2, alpha)); epsilon and rho are positive and capped at (1/2)^{1/alpha}.
DecayParams thresholds(double epsilon, double rho, double vartheta, double L, double gamma, int n,
                       double alpha);

// Unconditional two-scale comparison factor 12 / vartheta^{2(n+3)}.
double backwards_decay_factor(int n, double vartheta);

struct DecayCheck {
  double lhs = 0.0;     // E at the shrunk radius
  double rhs = 0.0;     // factor * E at the full radius (plus slack)
  double factor = 0.0;
  bool pass = false;
  double margin() const { return rhs - lhs; }
};

// Checks E(x,t,vartheta*r) <= (12/vartheta^{2(n+3)}) E(x,t,r) + quadrature
// slack. Holds at every admissible cylinder of every trajectory.
DecayCheck backwards_decay_check(const TrajectoryAnalytics& an, const ParabolicCylinder& cyl,
                                 double vartheta);

enum class DecayFlag { Regular, Unverified };

struct DecayEvidence {
  DecayFlag flag = DecayFlag::Unverified;
  bool entry_pass = false;
  std::string entry_reason;        // populated when entry fails
  bool radius_within_rho1 = false; // whether r0 < rho1 (informational at desk scale)
  std::vector<double> radii;       // r0, vartheta*r0, ... as far as the grid resolves
  std::vector<double> energies;    // E at those radii
  int scales_checked = 0;
  bool truncated = false;          // resolution floor hit before K scales
  double fitted_exponent = 0.0;    // slope of log E against log r; +inf if E vanishes
  double required_exponent = 0.0;  // 2*mu
};

// Entry conditions (|averages| < L/2 and E(r0) < epsilon1^2) followed by the
// geometric decay E(vartheta^k r0) <= 2^{-k} epsilon1^2 for k = 1..K, checked
// at every scale the grid resolves. Flags Regular when the entry conditions
// and every evaluated scale pass; scales below the resolution floor truncate
// the evidence rather than failing it.
DecayEvidence decay_classification(const TrajectoryAnalytics& an,
                                   const std::array<double, kMaxDim>& x, double t, double r0,
                                   const DecayParams& params, int K);

enum class FieldKind { TimeDerivative, SecondGradient };

// Region V x [t0, t1] with V a sub-box strictly inside the domain.
struct SpaceTimeRegion {
  std::array<double, kMaxDim> xlo{0.0, 0.0};
  std::array<double, kMaxDim> xhi{0.0, 0.0};
  double t0 = 0.0;
  double t1 = 0.0;
};

struct FractionalQuotients {
  std::vector<double> h;
  std::vector<double> D;   // squared-difference mass per offset
  double slope = 0.0;      // log-log fit; +inf if the field is time-constant
};

// Time-difference masses D_h = int_{t0}^{t1} int_V |w(x,t+h) - w(x,t)|^2 and
// their log-log slope across the offsets. Offsets must be step multiples and
// smaller than half of min{1, t0, T - t1}.
FractionalQuotients fractional_quotient_exponent(const TrajectoryAnalytics& an, FieldKind field,
                                                 const SpaceTimeRegion& region,
                                                 const std::vector<double>& h_list);

// Double-time Gagliardo sum  sum_{t != s} tau^2 int_V |w(t) - w(s)|^2 / |t-s|^{1+beta}.
// beta windows: (0, 1/2 - 1/p) for v_t and (0, alpha/2) for D^2 v, strictly open.
double gagliardo_time_seminorm(const TrajectoryAnalytics& an, FieldKind field, double beta,
                               const SpaceTimeRegion& region);

// Spatial companion with kernel |x - y|^{n + 2 kappa}, kappa in (0, 1).
double gagliardo_space_seminorm(const TrajectoryAnalytics& an, FieldKind field, double kappa,
                                const SpaceTimeRegion& region);

// Integrability exponent by spatial dimension: 4 for n = 1, 3.9 for n = 2
// (anything below 4 is available), 2 + 4/n for n >= 3.
double p_for_dimension(int n);

struct IntegrabilityReport {
  double p = 0.0;
  double vt_lp = 0.0;
  double vt_l2 = 0.0;
  double d2v_lp = 0.0;
  double d2v_l2 = 0.0;
};

IntegrabilityReport higher_integrability_report(const TrajectoryAnalytics& an,
                                                const SpaceTimeRegion& region);

struct SpaceTimePoint {
  std::array<double, kMaxDim> x{0.0, 0.0};
  double t = 0.0;
};

// Centers whose local energy at the smallest resolvable radius exceeds the
// threshold, or whose cylinder averages exceed the magnitude cap; centers
// whose cylinder does not resolve are skipped.
std::vector<SpaceTimePoint> singular_candidates(const TrajectoryAnalytics& an,
                                                const std::vector<SpaceTimePoint>& centers,
                                                double r_min, double threshold,
                                                double magnitude_cap);

// Number of parabolic cylinders of radius r needed to cover the set, realized
// as occupied cells of the lattice with spatial pitch 2r and temporal pitch
// r^2 (each occupied cell sits inside one cylinder centered at its midpoint).
// The lattice anchoring makes the count monotone under supersets.
size_t parabolic_covering_count(const std::vector<SpaceTimePoint>& points, int n, double r);

struct DimensionEstimate {
  std::vector<double> radii;
  std::vector<size_t> counts;
  double dimension = 0.0;
  double fit_residual = 0.0;
  bool empty_set = false;
};

// Covering counts across the radii (>= 3 of them spanning at least a decade)
// and the least-squares slope of log N(r) against log(1/r). An empty set
// reports dimension 0 with a flag.
DimensionEstimate parabolic_dimension(const std::vector<SpaceTimePoint>& points, int n,
                                      const std::vector<double>& radii);

struct Theorem1Budget {
  double beta = 0.0;
  double epsilon = 0.0;
  double dimension_bound = 0.0;  // n + 2 - 2 beta
};

// Canonical split of the open exponent budget min{alpha/2, 1/2 - 1/p}:
// beta takes half, epsilon a quarter, leaving the strict inequality intact.
Theorem1Budget theorem1_budget(double alpha, double p, int n);

// Least-squares slope of y against x; +inf when fewer than two finite points.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y,
                 double* residual = nullptr);

}  // namespace dnf
