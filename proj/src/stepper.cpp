#include "dnf/stepper.hpp"

#include <chrono>
#include <cmath>

namespace dnf {

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw config_error("solver tol must be positive");
  if (max_newton < 1) throw config_error("solver max_newton must be >= 1");
  if (!(armijo_slope > 0.0 && armijo_slope < 1.0)) throw config_error("bad armijo slope");
  if (!(armijo_backtrack > 0.0 && armijo_backtrack < 1.0)) throw config_error("bad backtrack factor");
  if (!(cg_rel_tol > 0.0 && cg_rel_tol < 1.0)) throw config_error("bad cg tolerance");
}

int SchemeGradient::cell_count() const {
  int c = 1;
  for (int d = 0; d < n; ++d) c *= dims[d];
  return c;
}

int SchemeGradient::flat(const std::array<int, kMaxDim>& c) const {
  int f = c[0];
  for (int d = 1; d < n; ++d) f = f * dims[d] + c[d];
  return f;
}

Eigen::MatrixXd SchemeGradient::cell(int flat_idx) const {
  return Eigen::Map<const Eigen::MatrixXd>(values.data() + static_cast<size_t>(flat_idx) * m * n,
                                           m, n);
}

namespace {

inline double node_value(const SnapshotField& f, const std::array<int, kMaxDim>& ghost, int comp) {
  // ghost coordinates: interior nodes live at 1..cells[d], boundary at 0 and
  // cells[d]+1 with the zero Dirichlet value.
  std::array<int, kMaxDim> idx = ghost;
  for (int d = 0; d < f.domain.n; ++d) {
    idx[d] -= 1;
    if (idx[d] < 0 || idx[d] >= f.domain.cells[d]) return 0.0;
  }
  return f.at(f.domain.flat(idx), comp);
}

struct CellIter {
  const BoxDomain& dom;
  std::array<int, kMaxDim> dims;
  int total;
  explicit CellIter(const BoxDomain& d) : dom(d), dims{1, 1}, total(1) {
    for (int ax = 0; ax < d.n; ++ax) {
      dims[ax] = d.cells[ax] + 1;
      total *= dims[ax];
    }
  }
  std::array<int, kMaxDim> unflat(int f) const {
    std::array<int, kMaxDim> c{0, 0};
    for (int d = dom.n - 1; d >= 0; --d) {
      c[d] = f % dims[d];
      f /= dims[d];
    }
    return c;
  }
};

}  // namespace

SchemeGradient scheme_gradient(const SnapshotField& field) {
  const BoxDomain& dom = field.domain;
  CellIter cells(dom);
  SchemeGradient g;
  g.m = field.m;
  g.n = dom.n;
  g.dims = cells.dims;
  g.values.assign(static_cast<size_t>(cells.total) * field.m * dom.n, 0.0);
  for (int cf = 0; cf < cells.total; ++cf) {
    const auto c = cells.unflat(cf);
    double* block = g.values.data() + static_cast<size_t>(cf) * field.m * dom.n;
    for (int j = 0; j < dom.n; ++j) {
      auto up = c;
      up[j] += 1;
      const double inv_h = 1.0 / dom.h(j);
      for (int i = 0; i < field.m; ++i) {
        // column-major block: entry (i, j) at j*m + i
        block[j * field.m + i] = (node_value(field, up, i) - node_value(field, c, i)) * inv_h;
      }
    }
  }
  return g;
}

double scheme_dirichlet_energy(const MatrixPotential& F, const SnapshotField& field) {
  const SchemeGradient g = scheme_gradient(field);
  const double vol = field.domain.cell_volume();
  double sum = 0.0;
  const int total = g.cell_count();
  for (int cf = 0; cf < total; ++cf) sum += F.value(g.cell(cf));
  return vol * sum;
}

double step_functional(const SnapshotField& v, const SnapshotField& v_prev, double tau,
                       const ScalarPotential& psi, const MatrixPotential& F,
                       const SnapshotField* forcing) {
  const BoxDomain& dom = v.domain;
  const double vol = dom.cell_volume();
  double sum = 0.0;
  const int nodes = dom.node_count();
  Eigen::VectorXd w(v.m);
  for (int q = 0; q < nodes; ++q) {
    for (int c = 0; c < v.m; ++c) w[c] = (v.at(q, c) - v_prev.at(q, c)) / tau;
    sum += tau * psi.value(w);
    if (forcing) {
      for (int c = 0; c < v.m; ++c) sum -= forcing->at(q, c) * v.at(q, c);
    }
  }
  return vol * sum + scheme_dirichlet_energy(F, v);
}

SnapshotField step_residual(const SnapshotField& v, const SnapshotField& v_prev, double tau,
                            const ScalarPotential& psi, const MatrixPotential& F,
                            const SnapshotField* forcing) {
  const BoxDomain& dom = v.domain;
  if (!(v_prev.domain == dom) || v_prev.m != v.m) {
    throw config_error("step_residual: field shapes disagree");
  }
  const SchemeGradient g = scheme_gradient(v);
  CellIter cells(dom);

  // Flux DF(Dv) per cell, same layout as the gradient.
  std::vector<double> flux(g.values.size());
  for (int cf = 0; cf < cells.total; ++cf) {
    const Eigen::MatrixXd df = F.gradient(g.cell(cf));
    Eigen::Map<Eigen::MatrixXd>(flux.data() + static_cast<size_t>(cf) * v.m * dom.n, v.m, dom.n) =
        df;
  }

  SnapshotField r(dom, v.m);
  Eigen::VectorXd w(v.m);
  const int nodes = dom.node_count();
  for (int q = 0; q < nodes; ++q) {
    for (int c = 0; c < v.m; ++c) w[c] = (v.at(q, c) - v_prev.at(q, c)) / tau;
    const Eigen::VectorXd dpsi = psi.gradient(w);
    const auto idx = dom.unflat(q);
    std::array<int, kMaxDim> ghost = idx;
    for (int d = 0; d < dom.n; ++d) ghost[d] += 1;  // node q owns cell `ghost`
    for (int c = 0; c < v.m; ++c) r.at(q, c) = dpsi[c];
    for (int j = 0; j < dom.n; ++j) {
      auto down = ghost;
      down[j] -= 1;
      const double inv_h = 1.0 / dom.h(j);
      const double* f_up = flux.data() + static_cast<size_t>(g.flat(ghost)) * v.m * dom.n;
      const double* f_dn = flux.data() + static_cast<size_t>(g.flat(down)) * v.m * dom.n;
      for (int c = 0; c < v.m; ++c) {
        r.at(q, c) += (f_dn[j * v.m + c] - f_up[j * v.m + c]) * inv_h;
      }
    }
    if (forcing) {
      for (int c = 0; c < v.m; ++c) r.at(q, c) -= forcing->at(q, c);
    }
  }
  return r;
}

double residual_norm(const SnapshotField& r) {
  double s = 0.0;
  for (double x : r.values) s += x * x;
  return std::sqrt(r.domain.cell_volume() * s);
}

namespace {

// Matrix-free application of the step-functional Hessian divided by vol:
//   (H w)_q = (1/tau) D2psi(dv/tau) w_q - div( D2F(Dv) Dw )_q.
struct HessianOperator {
  const BoxDomain& dom;
  int m;
  double tau;
  std::vector<Eigen::MatrixXd> node_h;   // D2psi at each node
  std::vector<Eigen::MatrixXd> cell_h;   // D2F at each cell (mn x mn)
  CellIter cells;

  HessianOperator(const SnapshotField& v, const SnapshotField& v_prev, double tau_,
                  const ScalarPotential& psi, const MatrixPotential& F)
      : dom(v.domain), m(v.m), tau(tau_), cells(v.domain) {
    const int nodes = dom.node_count();
    node_h.reserve(nodes);
    Eigen::VectorXd w(m);
    for (int q = 0; q < nodes; ++q) {
      for (int c = 0; c < m; ++c) w[c] = (v.at(q, c) - v_prev.at(q, c)) / tau;
      node_h.push_back(psi.hessian(w));
    }
    const SchemeGradient g = scheme_gradient(v);
    cell_h.reserve(cells.total);
    for (int cf = 0; cf < cells.total; ++cf) cell_h.push_back(F.hessian(g.cell(cf)));
  }

  void apply(const std::vector<double>& w, std::vector<double>& out) const {
    const int nodes = dom.node_count();
    SnapshotField wf;
    wf.domain = dom;
    wf.m = m;
    wf.values = w;
    const SchemeGradient gw = scheme_gradient(wf);

    // Per-cell D2F(Dv) vec(Dw), same layout as a gradient field.
    std::vector<double> flux(gw.values.size());
    for (int cf = 0; cf < cells.total; ++cf) {
      const Eigen::VectorXd gwv =
          Eigen::Map<const Eigen::VectorXd>(gw.values.data() + static_cast<size_t>(cf) * m * dom.n,
                                            m * dom.n);
      Eigen::Map<Eigen::VectorXd>(flux.data() + static_cast<size_t>(cf) * m * dom.n, m * dom.n) =
          cell_h[cf] * gwv;
    }

    out.assign(w.size(), 0.0);
    for (int q = 0; q < nodes; ++q) {
      const Eigen::VectorXd wq =
          Eigen::Map<const Eigen::VectorXd>(w.data() + static_cast<size_t>(q) * m, m);
      Eigen::VectorXd acc = node_h[q] * wq / tau;
      const auto idx = dom.unflat(q);
      std::array<int, kMaxDim> ghost = idx;
      for (int d = 0; d < dom.n; ++d) ghost[d] += 1;
      for (int j = 0; j < dom.n; ++j) {
        auto down = ghost;
        down[j] -= 1;
        const double inv_h = 1.0 / dom.h(j);
        const double* f_up = flux.data() + static_cast<size_t>(flat_cell(ghost)) * m * dom.n;
        const double* f_dn = flux.data() + static_cast<size_t>(flat_cell(down)) * m * dom.n;
        for (int c = 0; c < m; ++c) acc[c] += (f_dn[j * m + c] - f_up[j * m + c]) * inv_h;
      }
      for (int c = 0; c < m; ++c) out[static_cast<size_t>(q) * m + c] = acc[c];
    }
  }

  int flat_cell(const std::array<int, kMaxDim>& c) const {
    int f = c[0];
    for (int d = 1; d < dom.n; ++d) f = f * cells.dims[d] + c[d];
    return f;
  }

  std::vector<double> diagonal() const {
    const int nodes = dom.node_count();
    std::vector<double> diag(static_cast<size_t>(nodes) * m, 0.0);
    for (int q = 0; q < nodes; ++q) {
      const auto idx = dom.unflat(q);
      std::array<int, kMaxDim> ghost = idx;
      for (int d = 0; d < dom.n; ++d) ghost[d] += 1;
      for (int c = 0; c < m; ++c) {
        double dval = node_h[q](c, c) / tau;
        for (int j = 0; j < dom.n; ++j) {
          auto down = ghost;
          down[j] -= 1;
          const double inv_h2 = 1.0 / (dom.h(j) * dom.h(j));
          const int vc = j * m + c;  // vec index of entry (c, j)
          dval += (cell_h[flat_cell(ghost)](vc, vc) + cell_h[flat_cell(down)](vc, vc)) * inv_h2;
        }
        diag[static_cast<size_t>(q) * m + c] = dval;
      }
    }
    return diag;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Preconditioned conjugate gradients for H d = rhs; fixed iteration order so
// results do not depend on scheduling.
void cg_solve(const HessianOperator& H, const std::vector<double>& rhs, std::vector<double>& d,
              double rel_tol, int max_iters) {
  const size_t n = rhs.size();
  d.assign(n, 0.0);
  std::vector<double> r = rhs;
  const std::vector<double> diag = H.diagonal();
  std::vector<double> z(n), p(n), hp(n);
  for (size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = dot(r, z);
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  if (rhs_norm == 0.0) return;
  const double target = rel_tol * rhs_norm;
  for (int it = 0; it < max_iters; ++it) {
    if (std::sqrt(dot(r, r)) <= target) return;
    H.apply(p, hp);
    const double php = dot(p, hp);
    if (!(php > 0.0)) {
      throw contract_error("step Hessian lost positive definiteness; bounds certification broken");
    }
    const double a = rz / php;
    for (size_t i = 0; i < n; ++i) {
      d[i] += a * p[i];
      r[i] -= a * hp[i];
    }
    for (size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (std::sqrt(dot(r, r)) > target) {
    throw numeric_error("inner conjugate-gradient solve exceeded its iteration cap",
                        std::sqrt(dot(r, r)));
  }
}

}  // namespace

std::pair<SnapshotField, StepReport> solve_step(const SnapshotField& v_prev, double tau,
                                                const ScalarPotential& psi,
                                                const MatrixPotential& F, const SolverConfig& cfg,
                                                const SnapshotField* initial_guess) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  if (initial_guess &&
      (!(initial_guess->domain == v_prev.domain) || initial_guess->m != v_prev.m)) {
    throw config_error("solve_step: initial guess shape disagrees with v_prev");
  }
  SnapshotField v = initial_guess ? *initial_guess : v_prev;  // default start is O(tau) away
  StepReport rep;
  rep.functional_values.push_back(step_functional(v, v_prev, tau, psi, F, cfg.forcing));

  const int unknowns = v.domain.node_count() * v.m;
  const int cg_cap = cfg.cg_max_iters > 0 ? cfg.cg_max_iters : 40 * unknowns;

  for (int it = 0; it <= cfg.max_newton; ++it) {
    const SnapshotField r = step_residual(v, v_prev, tau, psi, F, cfg.forcing);
    const double res = residual_norm(r);
    rep.final_residual = res;
    rep.newton_iterations = it;
    if (res <= cfg.tol) {
      rep.wall_time_sec =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
      return {v, rep};
    }
    if (it == cfg.max_newton) break;

    const HessianOperator H(v, v_prev, tau, psi, F);
    // rhs = -grad J / vol = -residual field
    std::vector<double> rhs(r.values.size());
    for (size_t i = 0; i < rhs.size(); ++i) rhs[i] = -r.values[i];
    std::vector<double> d;
    cg_solve(H, rhs, d, cfg.cg_rel_tol, cg_cap);

    const double vol = v.domain.cell_volume();
    const double j0 = rep.functional_values.back();
    const double slope = vol * dot(r.values, d);  // <grad J, d>, negative for a descent direction
    // near the minimizer the true decrease sits below the functional's
    // roundoff floor; the test must not reject steps it cannot distinguish
    const double fp_floor = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(j0));
    double t = 1.0;
    bool accepted = false;
    SnapshotField trial = v;
    for (int ls = 0; ls < 60; ++ls) {
      for (size_t i = 0; i < trial.values.size(); ++i) trial.values[i] = v.values[i] + t * d[i];
      const double jt = step_functional(trial, v_prev, tau, psi, F, cfg.forcing);
      if (jt <= j0 + cfg.armijo_slope * t * slope + fp_floor) {
        v = trial;
        rep.functional_values.push_back(jt);
        accepted = true;
        break;
      }
      t *= cfg.armijo_backtrack;
    }
    if (!accepted) {
      throw contract_error(
          "line search failed to decrease the strictly convex step functional; "
          "potential certification is suspect");
    }
  }
  throw numeric_error("step solve exceeded the Newton iteration cap", rep.final_residual);
}

Trajectory run_scheme(const SnapshotField& g, const ScalarPotential& psi,
                      const MatrixPotential& F, const PotentialSpec& psi_spec,
                      const PotentialSpec& F_spec, int N, double T, const SolverConfig& cfg) {
  if (N < 1) throw config_error("run_scheme needs N >= 1");
  if (!(T > 0.0)) throw config_error("run_scheme needs T > 0");
  g.check_finite();

  const Eigen::VectorXd zero_w = Eigen::VectorXd::Zero(psi.m);
  const Eigen::MatrixXd zero_M = Eigen::MatrixXd::Zero(F.m, F.n);
  if (std::abs(psi.value(zero_w)) > 1e-12 || psi.gradient(zero_w).norm() > 1e-8 ||
      std::abs(F.value(zero_M)) > 1e-12 || F.gradient(zero_M).norm() > 1e-8) {
    throw config_error("run_scheme requires normalized potentials (zero value/gradient at origin)");
  }

  Trajectory traj;
  traj.domain = g.domain;
  traj.m = g.m;
  traj.tau = T / N;
  traj.psi_spec = psi_spec;
  traj.F_spec = F_spec;
  traj.solver_tol = cfg.tol;
  traj.snapshots.reserve(N + 1);
  traj.snapshots.push_back(g);
  for (int k = 1; k <= N; ++k) {
    try {
      auto [v, rep] = solve_step(traj.snapshots.back(), traj.tau, psi, F, cfg);
      rep.step = k;
      traj.reports.push_back(rep);
      traj.snapshots.push_back(std::move(v));
    } catch (const numeric_error& e) {
      throw numeric_error("scheme failed at step " + std::to_string(k) + ": " + e.what(),
                          e.residual());
    }
  }
  return traj;
}

std::pair<SnapshotField, SnapshotField> interpolants(const Trajectory& traj, double t) {
  const double T = traj.horizon();
  if (t < 0.0 || t > T * (1.0 + 1e-12)) {
    throw config_error("interpolant time outside [0, T]");
  }
  if (t <= 0.0) return {traj.snapshots[0], traj.snapshots[0]};
  int k = static_cast<int>(std::ceil(t / traj.tau - 1e-12));
  k = std::min(std::max(k, 1), traj.steps());
  const SnapshotField& a = traj.snapshots[k - 1];
  const SnapshotField& b = traj.snapshots[k];
  SnapshotField linear(traj.domain, traj.m);
  const double w = (t - traj.time(k - 1)) / traj.tau;
  for (size_t i = 0; i < linear.values.size(); ++i) {
    linear.values[i] = a.values[i] + w * (b.values[i] - a.values[i]);
  }
  return {b, linear};
}

}  // namespace dnf
