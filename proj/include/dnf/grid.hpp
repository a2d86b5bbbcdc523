#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dnf/errors.hpp"
#include "dnf/potentials.hpp"

namespace dnf {

constexpr int kMaxDim = 2;

// Axis-aligned box with a uniform interior lattice. Nodes are the interior
// lattice points; the boundary carries an implicit zero value. Spacing is
// h = (hi - lo) / (cells + 1) per axis.
struct BoxDomain {
  int n = 1;
  std::array<double, kMaxDim> lo{0.0, 0.0};
  std::array<double, kMaxDim> hi{1.0, 1.0};
  std::array<int, kMaxDim> cells{99, 0};

  BoxDomain() = default;
  BoxDomain(int dim, std::array<double, kMaxDim> lo_, std::array<double, kMaxDim> hi_,
            std::array<int, kMaxDim> cells_);

  double h(int axis) const { return (hi[axis] - lo[axis]) / (cells[axis] + 1); }
  double cell_volume() const;
  int node_count() const;

  // Flattened node index <-> per-axis interior index (0-based, axis-0 major).
  int flat(const std::array<int, kMaxDim>& idx) const;
  std::array<int, kMaxDim> unflat(int flat_idx) const;
  std::array<double, kMaxDim> node_coord(const std::array<int, kMaxDim>& idx) const;

  bool operator==(const BoxDomain&) const = default;
};

// One time slice of the solution: values of an R^m-valued map at every
// interior node, node-major layout. Immutable once written by the scheme.
struct SnapshotField {
  BoxDomain domain;
  int m = 1;
  std::vector<double> values;  // size node_count() * m

  SnapshotField() = default;
  SnapshotField(const BoxDomain& dom, int m_);

  double& at(int node, int comp) { return values[static_cast<size_t>(node) * m + comp]; }
  double at(int node, int comp) const { return values[static_cast<size_t>(node) * m + comp]; }
  void check_finite() const;
};

// Per-node m-by-n first-derivative matrices, entry (i, j) = d v^i / d x_j.
struct GradientField {
  int m = 1, n = 1;
  std::vector<double> values;  // node-major, then i*n + j
  double at(int node, int i, int j) const {
    return values[(static_cast<size_t>(node) * m + i) * n + j];
  }
};

// Per-node second derivatives, entry (i, j, k) = d^2 v^i / d x_j d x_k;
// symmetric in (j, k) by construction.
struct HessianField {
  int m = 1, n = 1;
  std::vector<double> values;  // node-major, then (i*n + j)*n + k
  double at(int node, int i, int j, int k) const {
    return values[((static_cast<size_t>(node) * m + i) * n + j) * n + k];
  }
};

struct StepReport {
  int step = 0;
  int newton_iterations = 0;
  double final_residual = 0.0;
  std::vector<double> functional_values;  // per accepted iterate, non-increasing
  double wall_time_sec = 0.0;
};

// Full run of the implicit scheme: snapshots v^0..v^N at spacing tau, plus
// the potential selections and solver tolerance needed to audit it later.
struct Trajectory {
  BoxDomain domain;
  int m = 1;
  double tau = 0.0;
  std::vector<SnapshotField> snapshots;  // size N + 1, snapshots[0] = initial datum
  PotentialSpec psi_spec;
  PotentialSpec F_spec;
  double solver_tol = 1e-10;
  std::vector<StepReport> reports;  // empty for externally loaded data

  int steps() const { return static_cast<int>(snapshots.size()) - 1; }
  double horizon() const { return tau * steps(); }
  double time(int k) const { return tau * k; }
  void validate() const;
};

// Space-time cylinder: ball of radius r around x crossed with the time
// interval (t - r^2/2, t + r^2/2).
struct ParabolicCylinder {
  std::array<double, kMaxDim> x{0.5, 0.0};
  double t = 0.0;
  double r = 0.0;
};

// Discrete membership of a cylinder: node indices with |x_node - x| < r and
// step indices k in 1..N with |k*tau - t| < r^2/2 (strict on both).
struct CylinderPoints {
  std::vector<int> nodes;
  std::vector<int> steps;
  size_t count() const { return nodes.size() * steps.size(); }
};

// Central differences with the zero boundary value filled in at the ghost
// ring; exact for affine fields at nodes whose full stencil is interior.
GradientField gradient(const SnapshotField& field);

// Second differences (diagonal) and cross differences (mixed); exact for
// quadratics at strictly interior nodes, symmetric in the two space slots.
HessianField hessian_field(const SnapshotField& field);

// Backward difference (v^k - v^{k-1}) / tau, the derivative the scheme
// itself controls; 1 <= k <= N.
SnapshotField time_derivative(const Trajectory& traj, int k);

// Midpoint sum over interior nodes: cell volume times the node values.
double integrate_space(const SnapshotField& field, int comp);
double integrate_space(const BoxDomain& domain, const std::vector<double>& node_values);

// Membership plus admissibility: at least 3 distinct node coordinates per
// spatial axis and 3 time steps, and the cylinder must sit inside the open
// space-time box. Throws geometry_error naming the deficient axis.
CylinderPoints cylinder_points(const Trajectory& traj, const ParabolicCylinder& cyl);

enum class CylinderQuantity { TimeDerivative, Gradient, Hessian };

// Precomputed derived fields for a trajectory so repeated cylinder sweeps do
// not rebuild stencil data. Read-only; safe to share across analytics.
class TrajectoryAnalytics {
 public:
  explicit TrajectoryAnalytics(const Trajectory& traj);

  const Trajectory& trajectory() const { return *traj_; }
  const SnapshotField& vt(int k) const { return vt_[k - 1]; }          // k in 1..N
  const GradientField& grad(int k) const { return grad_[k]; }          // k in 0..N
  const HessianField& hess(int k) const { return hess_[k]; }           // k in 0..N

  // Discrete space-time mean of the selected derived field over the cylinder;
  // layout: vt -> m entries; grad -> m*n; hess -> m*n*n.
  std::vector<double> cylinder_average(CylinderQuantity what, const ParabolicCylinder& cyl) const;
  std::vector<double> cylinder_average(CylinderQuantity what, const CylinderPoints& pts) const;

 private:
  const Trajectory* traj_;
  std::vector<SnapshotField> vt_;
  std::vector<GradientField> grad_;
  std::vector<HessianField> hess_;
};

}  // namespace dnf
