#pragma once

#include <functional>
#include <vector>

#include "dnf/grid.hpp"
#include "dnf/potentials.hpp"
#include "dnf/stepper.hpp"

namespace dnf {

// Per-step energy bookkeeping for a trajectory. Quadratures follow the
// scheme's own discrete operators (node sums for the time terms, cell sums
// for the Dirichlet terms), so that for exact steps the one-step defects are
// nonpositive and the ledger telescopes exactly.
struct EnergyLedger {
  struct Entry {
    int k = 0;
    double t = 0.0;
    double potential = 0.0;    // integral of F(Dv^k)
    double dissipation = 0.0;  // integral of Dpsi(delta_k/tau) . delta_k
    double dual = 0.0;         // integral of psi*(Dpsi(delta_k/tau))
    double d_defect = 0.0;     // dissipation + potential_k - potential_{k-1}
    double d_slack = 0.0;
    bool d_pass = true;
    double e_defect = 0.0;  // defined for k >= 2
    double e_slack = 0.0;
    bool e_pass = true;
    bool has_e = false;
  };

  double initial_potential = 0.0;  // integral of F(Dg)
  std::vector<Entry> entries;      // one per step k = 1..N

  bool all_d_pass() const;
  bool all_e_pass() const;
  double sum_dissipation() const;
  double sum_d_defect() const;
  // |sum d_k - (sum dissipation + potential_N - potential_0)|, an arithmetic
  // identity that must hold to roundoff regardless of solver quality.
  double telescoping_error() const;
};

EnergyLedger build_energy_ledger(const Trajectory& traj, const ScalarPotential& psi,
                                 const MatrixPotential& F);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  double slack = 0.0;
  bool pass = false;
  double margin() const { return rhs + slack - lhs; }
};

// Summed one-step inequality: sum_k |delta_k|^2/tau + max_k ||Dv^k||^2
// against C ||Dg||^2 with C = Lambda/(2 theta) + Lambda/lambda. The constant
// follows from the growth bounds: the dissipation sum is at most the initial
// Dirichlet energy over theta, and each Dirichlet energy is squeezed between
// lambda/2 and Lambda/2 times the gradient mass.
BoundCheck discrete_bound1_check(const Trajectory& traj, const ScalarPotential& psi,
                                 const MatrixPotential& F);

// Interior-window inequality obtained by weighting the second defect with a
// piecewise-linear ramp f (0 outside (0,T), 1 on [d, T-d], |f'| <= 2/d):
//   sum_{d<=t_k<=T-d} |D delta_k|^2/tau + max_{d<=t_k<=T-d} |delta_{k-1}/tau|^2
//   <= (C/d) ||Dg||^2,
// C = (Theta*Lambda/(2 theta)) * (1/lambda + 2/theta): the ramp summation
// bounds the lambda-weighted sum and the (theta/2)-weighted max separately by
// (Theta/d) * sum_k |delta_k|^2/tau, and the first bound's chain closes it.
// Requires 0 < d < T/2 and N large enough that the ramp vanishes on [0, 2tau].
BoundCheck discrete_bound2_check(const Trajectory& traj, const ScalarPotential& psi,
                                 const MatrixPotential& F, double d);

// Product cutoff adapted to a parabolic cylinder: spatial profile 1 on the
// r-box around x, 0 outside the 2r-box, |slope| <= 2/r per axis; temporal
// profile 1 on [t - r^2/2, t + r^2/2], 0 outside [t - 2r^2, t + 2r^2],
// |slope| <= 2/r^2.
struct CutoffFunction {
  std::array<double, kMaxDim> x{0.0, 0.0};
  double t = 0.0;
  double r = 0.0;

  double spatial(const std::array<double, kMaxDim>& y, int n) const;
  double temporal(double s) const;
  double eta(const std::array<double, kMaxDim>& y, int n, double s) const {
    return spatial(y, n) * temporal(s);
  }
  double phi(const std::array<double, kMaxDim>& y, int n, double s) const {
    const double e = eta(y, n, s);
    return e * e;
  }
  // Largest sampled difference quotient of each profile on the given grid;
  // used to verify the declared derivative bounds after sampling.
  double max_spatial_slope(const BoxDomain& dom) const;
  double max_temporal_slope(double tau, int steps) const;
};

// Residual time series of the two continuum identities under a smooth,
// compactly supported space-time test function phi:
//  (1) d/dt int phi F(Dv) + int phi Dpsi(v_t).v_t
//        = int (F(Dv) phi_t - v_t . DF(Dv) Dphi)
//  (2) d/dt int phi psi*(Dpsi(v_t)) + int phi D2F(Dv)(Dv_t, Dv_t)
//        = int (psi*(Dpsi(v_t)) phi_t - v_t . D2F(Dv) Dv_t Dphi).
// Discretized with centered time differences of the weighted integrals and
// central space stencils; the residuals shrink at first order in tau plus
// second order in h on smooth runs.
struct IdentityResiduals {
  std::vector<int> steps;
  std::vector<double> first;   // per-step residual of (1)
  std::vector<double> second;  // per-step residual of (2)
  double first_norm = 0.0;     // sqrt(tau * sum r^2)
  double second_norm = 0.0;
};

IdentityResiduals continuum_identity_residual(
    const TrajectoryAnalytics& an, const ScalarPotential& psi, const MatrixPotential& F,
    const std::function<double(const std::array<double, kMaxDim>&, double)>& phi);

// Reverse-Poincare check on concentric cylinders:
//   iint_{Q_r} |Dv_t|^2 <= (C/r^2) iint_{Q_2r} |v_t - mean|^2.
// C = 8 * C1 * max{1, Theta} / min{theta, lambda} where C1 is the interior
// energy constant (Theta + 2 Lambda^2/lambda) / (min{theta,lambda}/2); the
// product cutoff contributes eta|eta_t| + |D eta|^2 <= 6/r^2, so any
// C >= 6*C1 is admissible and the assembled factor is at least 8*C1.
BoundCheck caccioppoli_check(const TrajectoryAnalytics& an, const ScalarPotential& psi,
                             const MatrixPotential& F, const ParabolicCylinder& cyl);

double caccioppoli_constant(const ConvexityBounds& psi_bounds, const ConvexityBounds& F_bounds);
double interior_energy_constant(const ConvexityBounds& psi_bounds,
                                const ConvexityBounds& F_bounds);

}  // namespace dnf
