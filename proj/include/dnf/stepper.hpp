#pragma once

#include <utility>
#include <vector>

#include "dnf/grid.hpp"
#include "dnf/potentials.hpp"

namespace dnf {

struct SolverConfig {
  double tol = 1e-10;        // L2 norm of the step residual field on exit
  int max_newton = 60;       // outer iteration cap
  double armijo_slope = 1e-4;
  double armijo_backtrack = 0.5;
  double cg_rel_tol = 1e-2;  // inner tolerance, slaved to the outer residual
  int cg_max_iters = 0;      // 0 = 40 * unknown count

  // Manufactured-solution forcing: subtracts sum f.v * cellvol from the step
  // functional. Extension for validation runs only; the homogeneous flow
  // leaves this null.
  const SnapshotField* forcing = nullptr;

  void validate() const;
};

// The step functional is assembled from forward differences on the cell
// lattice: cell c (one per node plus the lower boundary layer per axis)
// carries the m-by-n matrix with column j = (v(c+e_j) - v(c)) / h_j, using
// the zero boundary value outside the interior lattice. Pairing the residual
// with a test field under this quadrature reproduces
//   sum_q vol Dpsi(dv/tau).w  +  sum_c vol DF(Dv).Dw,
// i.e. the discrete divergence is the exact negative adjoint of this
// gradient. For the quadratic matrix potential the assembled operator is the
// standard 3-point (5-point in 2d) Dirichlet Laplacian.
struct SchemeGradient {
  int m = 1, n = 1;
  std::array<int, kMaxDim> dims{0, 0};  // cells[d] + 1 per axis
  std::vector<double> values;           // cell-major, column-major m*n block

  int cell_count() const;
  int flat(const std::array<int, kMaxDim>& c) const;
  Eigen::MatrixXd cell(int flat_idx) const;
};

SchemeGradient scheme_gradient(const SnapshotField& field);

// sum over cells of vol * F(Dv): the potential part of the step functional
// and the discrete Dirichlet energy used by the a-priori bounds.
double scheme_dirichlet_energy(const MatrixPotential& F, const SnapshotField& field);

// Full step functional J(v) = sum_q vol tau psi((v - v_prev)/tau)
//                            + sum_c vol F(Dv) [- sum_q vol f.v].
double step_functional(const SnapshotField& v, const SnapshotField& v_prev, double tau,
                       const ScalarPotential& psi, const MatrixPotential& F,
                       const SnapshotField* forcing = nullptr);

// Gradient of the step functional divided by the cell volume: per node,
// Dpsi((v - v_prev)/tau) minus the discrete divergence of DF(Dv).
SnapshotField step_residual(const SnapshotField& v, const SnapshotField& v_prev, double tau,
                            const ScalarPotential& psi, const MatrixPotential& F,
                            const SnapshotField* forcing = nullptr);

// L2(U) norm of a residual field: sqrt(vol * sum |R_q|^2).
double residual_norm(const SnapshotField& r);

// Minimizes the strictly convex step functional by damped Newton with Armijo
// backtracking and a diagonally preconditioned conjugate-gradient inner
// solve. The initial iterate is v_prev unless an explicit guess is supplied;
// strict convexity makes the minimizer independent of the start. Returns the
// minimizer (residual norm <= cfg.tol) and an iteration report whose
// functional values are non-increasing up to arithmetic roundoff.
std::pair<SnapshotField, StepReport> solve_step(const SnapshotField& v_prev, double tau,
                                                const ScalarPotential& psi,
                                                const MatrixPotential& F, const SolverConfig& cfg,
                                                const SnapshotField* initial_guess = nullptr);

// Runs the implicit scheme for N steps of size T/N from the initial datum g.
// Potentials must be normalized (zero value and gradient at the origin).
Trajectory run_scheme(const SnapshotField& g, const ScalarPotential& psi,
                      const MatrixPotential& F, const PotentialSpec& psi_spec,
                      const PotentialSpec& F_spec, int N, double T, const SolverConfig& cfg);

// Piecewise-constant (right-continuous) and piecewise-linear interpolants of
// the snapshot sequence at time t in [0, T].
std::pair<SnapshotField, SnapshotField> interpolants(const Trajectory& traj, double t);

}  // namespace dnf
