#include "dnf/energy.hpp"

#include <algorithm>
#include <cmath>

namespace dnf {

namespace {

// Node-quadrature integral of Dpsi(delta/tau) . delta.
double dissipation_integral(const ScalarPotential& psi, const SnapshotField& cur,
                            const SnapshotField& prev, double tau) {
  const int nodes = cur.domain.node_count();
  const double vol = cur.domain.cell_volume();
  Eigen::VectorXd w(cur.m), delta(cur.m);
  double sum = 0.0;
  for (int q = 0; q < nodes; ++q) {
    for (int c = 0; c < cur.m; ++c) {
      delta[c] = cur.at(q, c) - prev.at(q, c);
      w[c] = delta[c] / tau;
    }
    sum += psi.gradient(w).dot(delta);
  }
  return vol * sum;
}

double dual_integral(const ScalarPotential& psi, const SnapshotField& cur,
                     const SnapshotField& prev, double tau) {
  const int nodes = cur.domain.node_count();
  const double vol = cur.domain.cell_volume();
  Eigen::VectorXd w(cur.m);
  double sum = 0.0;
  for (int q = 0; q < nodes; ++q) {
    for (int c = 0; c < cur.m; ++c) w[c] = (cur.at(q, c) - prev.at(q, c)) / tau;
    sum += dual_energy_value(psi, w);
  }
  return vol * sum;
}

double delta_l2(const SnapshotField& cur, const SnapshotField& prev) {
  double s = 0.0;
  for (size_t i = 0; i < cur.values.size(); ++i) {
    const double d = cur.values[i] - prev.values[i];
    s += d * d;
  }
  return std::sqrt(cur.domain.cell_volume() * s);
}

}  // namespace

bool EnergyLedger::all_d_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const Entry& e) { return e.d_pass; });
}

bool EnergyLedger::all_e_pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const Entry& e) { return !e.has_e || e.e_pass; });
}

double EnergyLedger::sum_dissipation() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.dissipation;
  return s;
}

double EnergyLedger::sum_d_defect() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.d_defect;
  return s;
}

double EnergyLedger::telescoping_error() const {
  if (entries.empty()) return 0.0;
  const double lhs = sum_d_defect();
  const double rhs = sum_dissipation() + entries.back().potential - initial_potential;
  return std::abs(lhs - rhs);
}

EnergyLedger build_energy_ledger(const Trajectory& traj, const ScalarPotential& psi,
                                 const MatrixPotential& F) {
  traj.validate();
  EnergyLedger ledger;
  ledger.initial_potential = scheme_dirichlet_energy(F, traj.snapshots[0]);
  const double tol = traj.solver_tol;

  double prev_potential = ledger.initial_potential;
  double prev_dual = 0.0;
  double prev_delta_norm = 0.0;
  for (int k = 1; k <= traj.steps(); ++k) {
    const SnapshotField& cur = traj.snapshots[k];
    const SnapshotField& before = traj.snapshots[k - 1];
    EnergyLedger::Entry e;
    e.k = k;
    e.t = traj.time(k);
    e.potential = scheme_dirichlet_energy(F, cur);
    e.dissipation = dissipation_integral(psi, cur, before, traj.tau);
    e.dual = dual_integral(psi, cur, before, traj.tau);

    const double dn = delta_l2(cur, before);
    e.d_defect = e.dissipation + e.potential - prev_potential;
    e.d_slack = tol * (1.0 + dn);
    e.d_pass = e.d_defect <= e.d_slack;

    if (k >= 2) {
      const SchemeGradient gk = scheme_gradient(cur);
      const SchemeGradient gp = scheme_gradient(before);
      const double vol = traj.domain.cell_volume();
      double mono = 0.0;
      const int total = gk.cell_count();
      for (int cf = 0; cf < total; ++cf) {
        const Eigen::MatrixXd a = gk.cell(cf);
        const Eigen::MatrixXd b = gp.cell(cf);
        mono += ((F.gradient(a) - F.gradient(b)).array() * (a - b).array()).sum();
      }
      e.has_e = true;
      e.e_defect = vol * mono + traj.tau * (e.dual - prev_dual);
      e.e_slack = tol * (1.0 + dn + prev_delta_norm);
      e.e_pass = e.e_defect <= e.e_slack;
    }

    prev_potential = e.potential;
    prev_dual = e.dual;
    prev_delta_norm = dn;
    ledger.entries.push_back(e);
  }
  return ledger;
}

BoundCheck discrete_bound1_check(const Trajectory& traj, const ScalarPotential& psi,
                                 const MatrixPotential& F) {
  traj.validate();
  const ConvexityBounds& pb = psi.bounds;
  const ConvexityBounds& fb = F.bounds;
  const double vol = traj.domain.cell_volume();

  double sum_rate = 0.0;       // sum_k |delta_k|^2 / tau
  double max_dirichlet = 0.0;  // max_k ||Dv^k||^2 over the cell lattice
  double max_delta = 0.0;
  for (int k = 1; k <= traj.steps(); ++k) {
    const auto& cur = traj.snapshots[k].values;
    const auto& prev = traj.snapshots[k - 1].values;
    double s = 0.0;
    for (size_t i = 0; i < cur.size(); ++i) {
      const double d = cur[i] - prev[i];
      s += d * d;
    }
    sum_rate += vol * s / traj.tau;
    max_delta = std::max(max_delta, std::sqrt(vol * s));

    const SchemeGradient g = scheme_gradient(traj.snapshots[k]);
    double dir = 0.0;
    const int total = g.cell_count();
    for (int cf = 0; cf < total; ++cf) dir += g.cell(cf).squaredNorm();
    max_dirichlet = std::max(max_dirichlet, vol * dir);
  }

  const SchemeGradient g0 = scheme_gradient(traj.snapshots[0]);
  double g_mass = 0.0;
  for (int cf = 0; cf < g0.cell_count(); ++cf) g_mass += g0.cell(cf).squaredNorm();
  g_mass *= vol;

  BoundCheck chk;
  chk.constant = fb.Lambda / (2.0 * pb.theta) + fb.Lambda / fb.lambda;
  chk.lhs = sum_rate + max_dirichlet;
  chk.rhs = chk.constant * g_mass;
  chk.slack = traj.steps() * traj.solver_tol * (1.0 + max_delta);
  chk.pass = chk.lhs <= chk.rhs + chk.slack;
  return chk;
}

BoundCheck discrete_bound2_check(const Trajectory& traj, const ScalarPotential& psi,
                                 const MatrixPotential& F, double d) {
  traj.validate();
  const double T = traj.horizon();
  if (!(d > 0.0 && d < 0.5 * T)) throw config_error("bound2 requires 0 < d < T/2");
  // The ramp rises on [d/2, d]; it must vanish through the second step.
  if (2.0 * traj.tau > 0.5 * d) {
    throw config_error("bound2 requires N large enough that the ramp vanishes on [0, 2*tau]");
  }
  const double vol = traj.domain.cell_volume();

  double window_grad_rate = 0.0;  // sum over the window of |D delta_k|^2 / tau
  double window_max_rate = 0.0;   // max over the window of |delta_{k-1}/tau|^2
  double max_delta = 0.0;
  for (int k = 2; k <= traj.steps(); ++k) {
    const double tk = traj.time(k);
    if (tk < d || tk > T - d) continue;
    const SchemeGradient gk = scheme_gradient(traj.snapshots[k]);
    const SchemeGradient gp = scheme_gradient(traj.snapshots[k - 1]);
    double s = 0.0;
    for (int cf = 0; cf < gk.cell_count(); ++cf) s += (gk.cell(cf) - gp.cell(cf)).squaredNorm();
    window_grad_rate += vol * s / traj.tau;

    const auto& a = traj.snapshots[k - 1].values;
    const auto& b = traj.snapshots[k - 2].values;
    double r = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
      const double di = (a[i] - b[i]) / traj.tau;
      r += di * di;
    }
    window_max_rate = std::max(window_max_rate, vol * r);
    max_delta = std::max(max_delta, delta_l2(traj.snapshots[k], traj.snapshots[k - 1]));
  }

  const SchemeGradient g0 = scheme_gradient(traj.snapshots[0]);
  double g_mass = 0.0;
  for (int cf = 0; cf < g0.cell_count(); ++cf) g_mass += g0.cell(cf).squaredNorm();
  g_mass *= vol;

  const ConvexityBounds& pb = psi.bounds;
  const ConvexityBounds& fb = F.bounds;
  BoundCheck chk;
  chk.constant =
      (pb.Theta * fb.Lambda / (2.0 * pb.theta)) * (1.0 / fb.lambda + 2.0 / pb.theta);
  chk.lhs = window_grad_rate + window_max_rate;
  chk.rhs = chk.constant / d * g_mass;
  chk.slack = traj.steps() * traj.solver_tol * (1.0 + max_delta) / d;
  chk.pass = chk.lhs <= chk.rhs + chk.slack;
  return chk;
}

double CutoffFunction::spatial(const std::array<double, kMaxDim>& y, int n) const {
  double prod = 1.0;
  for (int d = 0; d < n; ++d) {
    const double a = std::abs(y[d] - x[d]);
    double f;
    if (a <= r) {
      f = 1.0;
    } else if (a >= 2.0 * r) {
      f = 0.0;
    } else {
      f = (2.0 * r - a) / r;
    }
    prod *= f;
  }
  return prod;
}

double CutoffFunction::temporal(double s) const {
  const double a = std::abs(s - t);
  const double inner = 0.5 * r * r;
  const double outer = 2.0 * r * r;
  if (a <= inner) return 1.0;
  if (a >= outer) return 0.0;
  return (outer - a) / (outer - inner);
}

double CutoffFunction::max_spatial_slope(const BoxDomain& dom) const {
  double worst = 0.0;
  const int nodes = dom.node_count();
  for (int q = 0; q < nodes; ++q) {
    const auto idx = dom.unflat(q);
    const auto y = dom.node_coord(idx);
    for (int d = 0; d < dom.n; ++d) {
      auto up = y;
      up[d] += dom.h(d);
      worst = std::max(worst, std::abs(spatial(up, dom.n) - spatial(y, dom.n)) / dom.h(d));
    }
  }
  return worst;
}

double CutoffFunction::max_temporal_slope(double tau, int steps) const {
  double worst = 0.0;
  for (int k = 0; k < steps; ++k) {
    worst = std::max(worst, std::abs(temporal((k + 1) * tau) - temporal(k * tau)) / tau);
  }
  return worst;
}

IdentityResiduals continuum_identity_residual(
    const TrajectoryAnalytics& an, const ScalarPotential& psi, const MatrixPotential& F,
    const std::function<double(const std::array<double, kMaxDim>&, double)>& phi) {
  const Trajectory& traj = an.trajectory();
  const BoxDomain& dom = traj.domain;
  const int N = traj.steps();
  const int nodes = dom.node_count();
  const int m = traj.m;
  const int n = dom.n;
  const double vol = dom.cell_volume();
  const double tau = traj.tau;
  if (N < 4) throw config_error("identity residuals need at least 4 steps");

  // Sample the test function; it must vanish on the outermost node ring and
  // in the first/last two time slices (compact support on the open cylinder).
  std::vector<std::vector<double>> phis(N + 1, std::vector<double>(nodes));
  for (int k = 0; k <= N; ++k) {
    for (int q = 0; q < nodes; ++q) {
      phis[k][q] = phi(dom.node_coord(dom.unflat(q)), traj.time(k));
    }
  }
  for (int q = 0; q < nodes; ++q) {
    const auto idx = dom.unflat(q);
    bool on_ring = false;
    for (int d = 0; d < n; ++d) {
      if (idx[d] == 0 || idx[d] == dom.cells[d] - 1) on_ring = true;
    }
    for (int k = 0; k <= N; ++k) {
      const bool in_time_margin = (k <= 1 || k >= N - 1);
      if ((on_ring || in_time_margin) && phis[k][q] != 0.0) {
        throw contract_error("test function is not compactly supported on the open cylinder");
      }
    }
  }

  // Weighted integrals a_k = int phi F(Dv), b_k = int phi psi*(Dpsi(v_t)).
  std::vector<double> a(N + 1, 0.0), b(N + 1, 0.0);
  Eigen::VectorXd w(m);
  for (int k = 0; k <= N; ++k) {
    const GradientField& g = an.grad(k);
    double s = 0.0;
    for (int q = 0; q < nodes; ++q) {
      if (phis[k][q] == 0.0) continue;
      Eigen::MatrixXd M(m, n);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = g.at(q, i, j);
      s += phis[k][q] * F.value(M);
    }
    a[k] = vol * s;
    if (k >= 1) {
      const SnapshotField& vt = an.vt(k);
      double sb = 0.0;
      for (int q = 0; q < nodes; ++q) {
        if (phis[k][q] == 0.0) continue;
        for (int c = 0; c < m; ++c) w[c] = vt.at(q, c);
        sb += phis[k][q] * dual_energy_value(psi, w);
      }
      b[k] = vol * sb;
    }
  }

  IdentityResiduals out;
  for (int k = 2; k <= N - 1; ++k) {
    const SnapshotField& vt = an.vt(k);
    const GradientField& g = an.grad(k);
    const GradientField gvt = gradient(vt);

    double bulk1 = 0.0, rhs1 = 0.0, bulk2 = 0.0, rhs2 = 0.0;
    for (int q = 0; q < nodes; ++q) {
      const double p = phis[k][q];
      const double pt = (phis[k + 1][q] - phis[k - 1][q]) / (2.0 * tau);
      // central space gradient of the sampled phi, zero extension
      std::array<double, kMaxDim> dphi{0.0, 0.0};
      const auto idx = dom.unflat(q);
      for (int d = 0; d < n; ++d) {
        auto up = idx, dn = idx;
        up[d] += 1;
        dn[d] -= 1;
        const double pu = (up[d] < dom.cells[d]) ? phis[k][dom.flat(up)] : 0.0;
        const double pd = (dn[d] >= 0) ? phis[k][dom.flat(dn)] : 0.0;
        dphi[d] = (pu - pd) / (2.0 * dom.h(d));
      }
      const bool touched = p != 0.0 || pt != 0.0 || dphi[0] != 0.0 || dphi[1] != 0.0;
      if (!touched) continue;

      for (int c = 0; c < m; ++c) w[c] = vt.at(q, c);
      Eigen::MatrixXd M(m, n), Mt(m, n);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
          M(i, j) = g.at(q, i, j);
          Mt(i, j) = gvt.at(q, i, j);
        }
      }
      const Eigen::VectorXd dpsi = psi.gradient(w);
      const Eigen::MatrixXd df = F.gradient(M);
      bulk1 += p * dpsi.dot(w);
      double flux1 = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) flux1 += w[i] * df(i, j) * dphi[j];
      rhs1 += F.value(M) * pt - flux1;

      const Eigen::MatrixXd h = F.hessian(M);
      const Eigen::VectorXd hmt = h * Mt.reshaped();
      bulk2 += p * Mt.reshaped().dot(hmt);
      const Eigen::MatrixXd hmt_mat = hmt.reshaped(m, n);
      double flux2 = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) flux2 += w[i] * hmt_mat(i, j) * dphi[j];
      rhs2 += dual_energy_value(psi, w) * pt - flux2;
    }

    const double r1 = (a[k + 1] - a[k - 1]) / (2.0 * tau) + vol * bulk1 - vol * rhs1;
    const double r2 = (b[k + 1] - b[k - 1]) / (2.0 * tau) + vol * bulk2 - vol * rhs2;
    out.steps.push_back(k);
    out.first.push_back(r1);
    out.second.push_back(r2);
  }
  double s1 = 0.0, s2 = 0.0;
  for (size_t i = 0; i < out.first.size(); ++i) {
    s1 += out.first[i] * out.first[i];
    s2 += out.second[i] * out.second[i];
  }
  out.first_norm = std::sqrt(tau * s1);
  out.second_norm = std::sqrt(tau * s2);
  return out;
}

double interior_energy_constant(const ConvexityBounds& psi_bounds,
                                const ConvexityBounds& F_bounds) {
  return (psi_bounds.Theta + 2.0 * F_bounds.Lambda * F_bounds.Lambda / F_bounds.lambda) /
         (0.5 * std::min(psi_bounds.theta, F_bounds.lambda));
}

double caccioppoli_constant(const ConvexityBounds& psi_bounds, const ConvexityBounds& F_bounds) {
  const double c1 = interior_energy_constant(psi_bounds, F_bounds);
  return 8.0 * c1 * std::max(1.0, psi_bounds.Theta) /
         std::min(psi_bounds.theta, F_bounds.lambda);
}

BoundCheck caccioppoli_check(const TrajectoryAnalytics& an, const ScalarPotential& psi,
                             const MatrixPotential& F, const ParabolicCylinder& cyl) {
  const Trajectory& traj = an.trajectory();
  ParabolicCylinder outer = cyl;
  outer.r = 2.0 * cyl.r;
  const CylinderPoints inner_pts = cylinder_points(traj, cyl);
  const CylinderPoints outer_pts = cylinder_points(traj, outer);
  const double vol_dt = traj.domain.cell_volume() * traj.tau;
  const int m = traj.m;
  const int n = traj.domain.n;

  double lhs = 0.0;
  for (int k : inner_pts.steps) {
    const GradientField gvt = gradient(an.vt(k));
    for (int q : inner_pts.nodes) {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) lhs += gvt.at(q, i, j) * gvt.at(q, i, j);
    }
  }
  lhs *= vol_dt;

  const std::vector<double> mean = an.cylinder_average(CylinderQuantity::TimeDerivative, outer_pts);
  double osc = 0.0;
  for (int k : outer_pts.steps) {
    const SnapshotField& vt = an.vt(k);
    for (int q : outer_pts.nodes) {
      for (int c = 0; c < m; ++c) {
        const double d = vt.at(q, c) - mean[c];
        osc += d * d;
      }
    }
  }
  osc *= vol_dt;

  BoundCheck chk;
  chk.constant = caccioppoli_constant(psi.bounds, F.bounds);
  chk.lhs = lhs;
  chk.rhs = chk.constant / (cyl.r * cyl.r) * osc;
  chk.slack = traj.solver_tol * (1.0 + osc);
  chk.pass = chk.lhs <= chk.rhs + chk.slack;
  return chk;
}

}  // namespace dnf
