#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dnf/errors.hpp"

namespace dnf {

// Two-sided convexity constants. theta/Theta bound the monotonicity of the
// scalar gradient, lambda/Lambda the monotonicity of the matrix gradient,
// and (alpha, holder_const) describe Hölder continuity of the matrix Hessian.
struct ConvexityBounds {
  double theta = 1.0;
  double Theta = 1.0;
  double lambda = 1.0;
  double Lambda = 1.0;
  double alpha = 1.0;
  double holder_const = 0.0;

  void validate() const;
};

// Uniformly convex nonlinearity on R^m supplied as an evaluator triple.
// Evaluators must be pure; potentials are immutable after construction.
struct ScalarPotential {
  int m = 1;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  ConvexityBounds bounds;
};

// Uniformly convex nonlinearity on m-by-n matrices. The Hessian evaluator
// returns the symmetric (m*n)x(m*n) matrix H acting on column-major vec(M),
// so the bilinear form is vec(xi)^T H vec(zeta).
struct MatrixPotential {
  int m = 1;
  int n = 1;
  std::function<double(const Eigen::MatrixXd&)> value;
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> hessian;
  ConvexityBounds bounds;
};

// Named potential selection used by configs and trajectory metadata.
// Families: "quadratic", "soft-quadratic" (quadratic + epsilon*(sqrt(1+|.|^2)-1)),
// "aniso-quadratic" (0.5 * <diag(a) vec, vec>).
struct PotentialSpec {
  std::string family = "quadratic";
  double epsilon = 0.0;           // soft-quadratic only
  std::vector<double> diag;       // aniso-quadratic only
  bool has_bounds_override = false;
  ConvexityBounds bounds_override;  // used by certification fixtures
};

ScalarPotential make_scalar_potential(const PotentialSpec& spec, int m);
MatrixPotential make_matrix_potential(const PotentialSpec& spec, int m, int n);

// Shifts a convex potential so that its minimum sits at the origin with value
// zero: returns psi_tilde(w) = psi(w + a) - psi(a) where a = argmin psi, found
// by damped Newton on the gradient. The caller absorbs the shift as a linear
// drift in time when reducing an evolution to the normalized problem.
std::pair<ScalarPotential, Eigen::VectorXd> normalize_scalar(const ScalarPotential& psi);

// Subtracts the affine part at the origin: F_tilde(M) = F(M) - F(O) - DF(O).M.
// The Hessian is unchanged.
MatrixPotential normalize_matrix(const MatrixPotential& F);

// Inverts the gradient map: returns w with |Dpsi(w) - z| <= tol. This is the
// gradient of the convex conjugate at z. Globally convergent damped Newton
// (the Hessian is uniformly positive definite).
Eigen::VectorXd legendre_dual_grad(const ScalarPotential& psi, const Eigen::VectorXd& z,
                                   double tol = 1e-12);

// Convex conjugate psi*(z) = z.w - psi(w) at w = legendre_dual_grad(psi, z).
double legendre_value(const ScalarPotential& psi, const Eigen::VectorXd& z, double tol = 1e-12);

// Value of psi*(Dpsi(w)) = Dpsi(w).w - psi(w), evaluated without inverting
// the gradient. This is the dual energy density used by the energy ledger.
double dual_energy_value(const ScalarPotential& psi, const Eigen::VectorXd& w);

// One observed-bound line of a certification report.
struct BoundLine {
  std::string name;
  double min_ratio = 0.0;  // smallest observed quantity / lower-bound scale
  double max_ratio = 0.0;  // largest observed quantity / upper-bound scale
  bool pass = true;
  Eigen::VectorXd witness;  // flattened sample where the worst violation occurred
};

struct BoundsReport {
  bool pass = true;
  std::vector<BoundLine> lines;
  std::string summary() const;
};

// Draws deterministic pseudo-random samples within |.| <= radius and checks
// the declared two-sided constants: gradient monotonicity ratios, Hessian
// eigenvalue range, and the four growth inequalities that follow from them
// (value, duality gap, gradient pairing, gradient norm). Slack 1e-9.
BoundsReport verify_bounds(const ScalarPotential& psi, int sample_count, double radius,
                           unsigned seed);
BoundsReport verify_bounds(const MatrixPotential& F, int sample_count, double radius,
                           unsigned seed);

// Largest admissible Hölder exponent min(alpha, 2(p-2)/p): exponents above
// the cap are lowered, which is always allowed because the Hessian range is
// bounded. Requires alpha in (0,1] and p > 2.
double effective_alpha(double alpha, double p);

// Least-squares fit of log|D2F(M1)-D2F(M2)| against log|M1-M2| on seeded
// sample pairs. Returns (alpha_hat clamped to (0,1], const_hat). A constant
// Hessian reports (1, 0) by convention. Certification passes when
// alpha_hat >= declared alpha - 0.05.
std::pair<double, double> hessian_holder_estimate(const MatrixPotential& F, int sample_count,
                                                  unsigned seed);

}  // namespace dnf
