#include "dnf/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace dnf {

LocalEnergySample local_energy(const TrajectoryAnalytics& an, const ParabolicCylinder& cyl) {
  const Trajectory& traj = an.trajectory();
  const CylinderPoints pts = cylinder_points(traj, cyl);
  const int m = traj.m;
  const int n = traj.domain.n;

  const std::vector<double> a_vt = an.cylinder_average(CylinderQuantity::TimeDerivative, pts);
  const std::vector<double> a_dv = an.cylinder_average(CylinderQuantity::Gradient, pts);
  const std::vector<double> a_d2 = an.cylinder_average(CylinderQuantity::Hessian, pts);

  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  for (int k : pts.steps) {
    const SnapshotField& vt = an.vt(k);
    const GradientField& g = an.grad(k);
    const HessianField& hs = an.hess(k);
    for (int q : pts.nodes) {
      const auto y = traj.domain.node_coord(traj.domain.unflat(q));
      for (int c = 0; c < m; ++c) {
        const double d = vt.at(q, c) - a_vt[c];
        t1 += d * d;
      }
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
          // affine model of the gradient: mean + mean-second-derivative (y - x)
          double model = a_dv[i * n + j];
          for (int k2 = 0; k2 < n; ++k2) {
            model += a_d2[(i * n + j) * n + k2] * (y[k2] - cyl.x[k2]);
          }
          const double d = (g.at(q, i, j) - model) / cyl.r;
          t2 += d * d;
          for (int k2 = 0; k2 < n; ++k2) {
            const double dh = hs.at(q, i, j, k2) - a_d2[(i * n + j) * n + k2];
            t3 += dh * dh;
          }
        }
      }
    }
  }
  const double count = static_cast<double>(pts.count());
  LocalEnergySample s;
  s.cyl = cyl;
  s.T1 = t1 / count;
  s.T2 = t2 / count;
  s.T3 = t3 / count;
  return s;
}

DecayParams thresholds(double epsilon, double rho, double vartheta, double L, double gamma, int n,
                       double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw config_error("alpha must lie in (0, 1]");
  if (n < 1 || n > kMaxDim) throw config_error("spatial dimension must be 1 or 2");
  if (!(L > 0.0)) throw config_error("magnitude cap L must be positive");
  const double cap = std::pow(0.5, 1.0 / alpha);
  if (!(vartheta > 0.0 && vartheta < cap)) {
    throw config_error("vartheta must lie strictly inside (0, (1/2)^{1/alpha})");
  }
  if (!(gamma > 0.5 * alpha && gamma < alpha)) {
    throw config_error("gamma must lie strictly inside (alpha/2, alpha)");
  }
  if (!(epsilon > 0.0 && epsilon <= cap)) {
    throw config_error("epsilon must lie in (0, (1/2)^{1/alpha}]");
  }
  if (!(rho > 0.0 && rho <= cap)) {
    throw config_error("rho must lie in (0, (1/2)^{1/alpha}]");
  }

  DecayParams p;
  p.L = L;
  p.gamma = gamma;
  p.epsilon = epsilon;
  p.rho = rho;
  p.vartheta = vartheta;
  p.alpha = alpha;
  p.n = n;
  p.epsilon1 = std::min(epsilon, std::pow(vartheta, 0.5 * n + 1.0) * L / 8.0);
  p.rho1 = std::min(rho, std::pow(std::pow(vartheta, 2.0 * (n + 3)) * p.epsilon1 * p.epsilon1 /
                                      (24.0 * L),
                                  1.0 / (2.0 * gamma)));
  // ratio of base-2 logarithms so powers of two evaluate exactly
  p.mu = 0.5 * std::log2(0.5) / std::log2(vartheta);
  return p;
}

double backwards_decay_factor(int n, double vartheta) {
  if (!(vartheta > 0.0 && vartheta <= 1.0)) throw config_error("vartheta must lie in (0, 1]");
  return 12.0 / std::pow(vartheta, 2.0 * (n + 3));
}

DecayCheck backwards_decay_check(const TrajectoryAnalytics& an, const ParabolicCylinder& cyl,
                                 double vartheta) {
  ParabolicCylinder shrunk = cyl;
  shrunk.r = vartheta * cyl.r;
  const LocalEnergySample big = local_energy(an, cyl);
  const LocalEnergySample small = local_energy(an, shrunk);
  DecayCheck chk;
  chk.factor = backwards_decay_factor(an.trajectory().domain.n, vartheta);
  chk.lhs = small.E();
  chk.rhs = chk.factor * big.E() + 1e-9 * (1.0 + big.E());
  chk.pass = chk.lhs <= chk.rhs;
  return chk;
}

namespace {

double tensor_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

DecayEvidence decay_classification(const TrajectoryAnalytics& an,
                                   const std::array<double, kMaxDim>& x, double t, double r0,
                                   const DecayParams& params, int K) {
  if (K < 1) throw config_error("decay_classification needs K >= 1");
  DecayEvidence ev;
  ev.required_exponent = 2.0 * params.mu;
  ev.radius_within_rho1 = r0 < params.rho1;

  ParabolicCylinder cyl;
  cyl.x = x;
  cyl.t = t;
  cyl.r = r0;
  const CylinderPoints pts = cylinder_points(an.trajectory(), cyl);  // throws if unresolvable

  const std::vector<double> a_vt = an.cylinder_average(CylinderQuantity::TimeDerivative, pts);
  const std::vector<double> a_dv = an.cylinder_average(CylinderQuantity::Gradient, pts);
  const std::vector<double> a_d2 = an.cylinder_average(CylinderQuantity::Hessian, pts);
  const LocalEnergySample e0 = local_energy(an, cyl);
  ev.radii.push_back(r0);
  ev.energies.push_back(e0.E());

  const double half_cap = 0.5 * params.L;
  if (tensor_norm(a_vt) >= half_cap) {
    ev.entry_reason = "entry condition: |(v_t)_Q| >= L/2";
  } else if (tensor_norm(a_dv) >= half_cap) {
    ev.entry_reason = "entry condition: |(Dv)_Q| >= L/2";
  } else if (tensor_norm(a_d2) >= half_cap) {
    ev.entry_reason = "entry condition: |(D2v)_Q| >= L/2";
  } else if (e0.E() >= params.epsilon1 * params.epsilon1) {
    ev.entry_reason = "entry condition: E(r0) >= epsilon1^2";
  }
  ev.entry_pass = ev.entry_reason.empty();

  bool decay_ok = true;
  if (ev.entry_pass) {
    double bound = params.epsilon1 * params.epsilon1;
    for (int k = 1; k <= K; ++k) {
      bound *= 0.5;
      ParabolicCylinder shrunk = cyl;
      shrunk.r = std::pow(params.vartheta, k) * r0;
      LocalEnergySample ek;
      try {
        ek = local_energy(an, shrunk);
      } catch (const geometry_error&) {
        ev.truncated = true;
        break;
      }
      ev.radii.push_back(shrunk.r);
      ev.energies.push_back(ek.E());
      ev.scales_checked = k;
      if (ek.E() > bound + 1e-12 * params.epsilon1 * params.epsilon1) {
        decay_ok = false;
        break;
      }
    }
  }

  std::vector<double> lr, le;
  for (size_t i = 0; i < ev.radii.size(); ++i) {
    if (ev.energies[i] > 0.0) {
      lr.push_back(std::log(ev.radii[i]));
      le.push_back(std::log(ev.energies[i]));
    }
  }
  ev.fitted_exponent = lr.size() >= 2 ? fit_slope(lr, le)
                                      : std::numeric_limits<double>::infinity();

  ev.flag = (ev.entry_pass && decay_ok) ? DecayFlag::Regular : DecayFlag::Unverified;
  return ev;
}

namespace {

struct RegionIndex {
  std::vector<int> nodes;
  std::vector<int> steps;  // k with t_k in [t0, t1]
};

RegionIndex region_points(const Trajectory& traj, const SpaceTimeRegion& region) {
  const BoxDomain& dom = traj.domain;
  for (int d = 0; d < dom.n; ++d) {
    if (!(region.xlo[d] >= dom.lo[d] && region.xhi[d] <= dom.hi[d] &&
          region.xlo[d] < region.xhi[d])) {
      throw geometry_error("region must be a sub-box of the domain", "x" + std::to_string(d));
    }
  }
  if (!(region.t0 > 0.0 && region.t1 <= traj.horizon() && region.t0 < region.t1)) {
    throw geometry_error("region time window must sit inside (0, T]", "time");
  }
  RegionIndex idx;
  const int nodes = dom.node_count();
  for (int q = 0; q < nodes; ++q) {
    const auto y = dom.node_coord(dom.unflat(q));
    bool inside = true;
    for (int d = 0; d < dom.n; ++d) {
      if (y[d] < region.xlo[d] || y[d] > region.xhi[d]) inside = false;
    }
    if (inside) idx.nodes.push_back(q);
  }
  for (int k = 1; k <= traj.steps(); ++k) {
    const double t = traj.time(k);
    if (t >= region.t0 - 1e-12 && t <= region.t1 + 1e-12) idx.steps.push_back(k);
  }
  if (idx.nodes.empty()) throw geometry_error("region contains no nodes", "x0");
  if (idx.steps.empty()) throw geometry_error("region contains no steps", "time");
  return idx;
}

// Squared Frobenius distance between the selected field at two time indices,
// summed over the region's nodes.
double field_time_diff2(const TrajectoryAnalytics& an, FieldKind field, int k1, int k2,
                        const std::vector<int>& nodes) {
  double s = 0.0;
  if (field == FieldKind::TimeDerivative) {
    const SnapshotField& a = an.vt(k1);
    const SnapshotField& b = an.vt(k2);
    const int m = a.m;
    for (int q : nodes) {
      for (int c = 0; c < m; ++c) {
        const double d = a.at(q, c) - b.at(q, c);
        s += d * d;
      }
    }
  } else {
    const HessianField& a = an.hess(k1);
    const HessianField& b = an.hess(k2);
    const int w = a.m * a.n * a.n;
    for (int q : nodes) {
      for (int c = 0; c < w; ++c) {
        const double d = a.values[static_cast<size_t>(q) * w + c] -
                         b.values[static_cast<size_t>(q) * w + c];
        s += d * d;
      }
    }
  }
  return s;
}

double field_value2(const TrajectoryAnalytics& an, FieldKind field, int k, int q) {
  double s = 0.0;
  if (field == FieldKind::TimeDerivative) {
    const SnapshotField& a = an.vt(k);
    for (int c = 0; c < a.m; ++c) s += a.at(q, c) * a.at(q, c);
  } else {
    const HessianField& a = an.hess(k);
    const int w = a.m * a.n * a.n;
    for (int c = 0; c < w; ++c) {
      const double v = a.values[static_cast<size_t>(q) * w + c];
      s += v * v;
    }
  }
  return s;
}

}  // namespace

FractionalQuotients fractional_quotient_exponent(const TrajectoryAnalytics& an, FieldKind field,
                                                 const SpaceTimeRegion& region,
                                                 const std::vector<double>& h_list) {
  const Trajectory& traj = an.trajectory();
  const double T = traj.horizon();
  const double window = 0.5 * std::min({1.0, region.t0, T - region.t1});
  const RegionIndex idx = region_points(traj, region);
  const double vol = traj.domain.cell_volume();

  FractionalQuotients out;
  for (double h : h_list) {
    if (!(h > 0.0 && h < window)) {
      throw config_error("offset h outside the admissible window (0, min{1,t0,T-t1}/2)");
    }
    const double steps_f = h / traj.tau;
    const int j = static_cast<int>(std::llround(steps_f));
    if (j < 1 || std::abs(steps_f - j) > 1e-9) {
      throw config_error("offset h must be a whole number of time steps");
    }
    double mass = 0.0;
    for (int k : idx.steps) {
      if (k + j > traj.steps()) {
        throw config_error("offset h reaches past the final snapshot");
      }
      mass += field_time_diff2(an, field, k + j, k, idx.nodes);
    }
    out.h.push_back(h);
    out.D.push_back(mass * vol * traj.tau);
  }

  std::vector<double> lx, ly;
  for (size_t i = 0; i < out.h.size(); ++i) {
    if (out.D[i] > 0.0) {
      lx.push_back(std::log(out.h[i]));
      ly.push_back(std::log(out.D[i]));
    }
  }
  out.slope = lx.size() >= 2 ? fit_slope(lx, ly) : std::numeric_limits<double>::infinity();
  return out;
}

double gagliardo_time_seminorm(const TrajectoryAnalytics& an, FieldKind field, double beta,
                               const SpaceTimeRegion& region) {
  const Trajectory& traj = an.trajectory();
  double upper;
  if (field == FieldKind::TimeDerivative) {
    upper = 0.5 - 1.0 / p_for_dimension(traj.domain.n);
  } else {
    // window is half the declared Hessian Hölder exponent
    const ConvexityBounds fb =
        make_matrix_potential(traj.F_spec, traj.m, traj.domain.n).bounds;
    upper = 0.5 * fb.alpha;
  }
  if (!(beta > 0.0 && beta < upper)) {
    throw config_error("beta outside its strictly open admissibility window (0, " +
                       std::to_string(upper) + ")");
  }
  const RegionIndex idx = region_points(traj, region);
  const double vol = traj.domain.cell_volume();
  const double tau = traj.tau;

  double sum = 0.0;
  for (size_t a = 0; a < idx.steps.size(); ++a) {
    for (size_t b = 0; b < idx.steps.size(); ++b) {
      if (a == b) continue;
      const int k1 = idx.steps[a];
      const int k2 = idx.steps[b];
      const double dt = std::abs(traj.time(k1) - traj.time(k2));
      sum += field_time_diff2(an, field, k1, k2, idx.nodes) / std::pow(dt, 1.0 + beta);
    }
  }
  return sum * vol * tau * tau;
}

double gagliardo_space_seminorm(const TrajectoryAnalytics& an, FieldKind field, double kappa,
                                const SpaceTimeRegion& region) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw config_error("kappa must lie strictly inside (0, 1)");
  }
  const Trajectory& traj = an.trajectory();
  const RegionIndex idx = region_points(traj, region);
  const BoxDomain& dom = traj.domain;
  const double vol = dom.cell_volume();
  const int m = traj.m;
  const int n = dom.n;

  double sum = 0.0;
  for (int k : idx.steps) {
    for (size_t a = 0; a < idx.nodes.size(); ++a) {
      for (size_t b = 0; b < idx.nodes.size(); ++b) {
        if (a == b) continue;
        const int qa = idx.nodes[a];
        const int qb = idx.nodes[b];
        const auto xa = dom.node_coord(dom.unflat(qa));
        const auto xb = dom.node_coord(dom.unflat(qb));
        double dist2 = 0.0;
        for (int d = 0; d < n; ++d) dist2 += (xa[d] - xb[d]) * (xa[d] - xb[d]);
        double diff2 = 0.0;
        if (field == FieldKind::TimeDerivative) {
          const SnapshotField& f = an.vt(k);
          for (int c = 0; c < m; ++c) {
            const double d = f.at(qa, c) - f.at(qb, c);
            diff2 += d * d;
          }
        } else {
          const HessianField& f = an.hess(k);
          const int w = m * n * n;
          for (int c = 0; c < w; ++c) {
            const double d = f.values[static_cast<size_t>(qa) * w + c] -
                             f.values[static_cast<size_t>(qb) * w + c];
            diff2 += d * d;
          }
        }
        sum += diff2 / std::pow(std::sqrt(dist2), n + 2.0 * kappa);
      }
    }
  }
  return sum * vol * vol * traj.tau;
}

double p_for_dimension(int n) {
  if (n == 1) return 4.0;
  if (n == 2) return 3.9;
  return 2.0 + 4.0 / n;
}

IntegrabilityReport higher_integrability_report(const TrajectoryAnalytics& an,
                                                const SpaceTimeRegion& region) {
  const Trajectory& traj = an.trajectory();
  const RegionIndex idx = region_points(traj, region);
  const double vol_dt = traj.domain.cell_volume() * traj.tau;

  IntegrabilityReport rep;
  rep.p = p_for_dimension(traj.domain.n);
  double vt_p = 0.0, vt_2 = 0.0, d2_p = 0.0, d2_2 = 0.0;
  for (int k : idx.steps) {
    for (int q : idx.nodes) {
      const double vt2 = field_value2(an, FieldKind::TimeDerivative, k, q);
      const double d22 = field_value2(an, FieldKind::SecondGradient, k, q);
      vt_2 += vt2;
      d2_2 += d22;
      vt_p += std::pow(vt2, 0.5 * rep.p);
      d2_p += std::pow(d22, 0.5 * rep.p);
    }
  }
  rep.vt_l2 = std::sqrt(vol_dt * vt_2);
  rep.d2v_l2 = std::sqrt(vol_dt * d2_2);
  rep.vt_lp = std::pow(vol_dt * vt_p, 1.0 / rep.p);
  rep.d2v_lp = std::pow(vol_dt * d2_p, 1.0 / rep.p);
  return rep;
}

std::vector<SpaceTimePoint> singular_candidates(const TrajectoryAnalytics& an,
                                                const std::vector<SpaceTimePoint>& centers,
                                                double r_min, double threshold,
                                                double magnitude_cap) {
  std::vector<SpaceTimePoint> flagged;
  for (const auto& c : centers) {
    ParabolicCylinder cyl;
    cyl.x = c.x;
    cyl.t = c.t;
    cyl.r = r_min;
    LocalEnergySample s;
    std::vector<double> a_vt, a_dv, a_d2;
    try {
      const CylinderPoints pts = cylinder_points(an.trajectory(), cyl);
      s = local_energy(an, cyl);
      a_vt = an.cylinder_average(CylinderQuantity::TimeDerivative, pts);
      a_dv = an.cylinder_average(CylinderQuantity::Gradient, pts);
      a_d2 = an.cylinder_average(CylinderQuantity::Hessian, pts);
    } catch (const geometry_error&) {
      continue;  // unresolvable center: no evidence either way
    }
    const bool energy_flag = s.E() > threshold;
    const bool magnitude_flag = tensor_norm(a_vt) > magnitude_cap ||
                                tensor_norm(a_dv) > magnitude_cap ||
                                tensor_norm(a_d2) > magnitude_cap;
    if (energy_flag || magnitude_flag) flagged.push_back(c);
  }
  return flagged;
}

size_t parabolic_covering_count(const std::vector<SpaceTimePoint>& points, int n, double r) {
  if (!(r > 0.0)) throw config_error("covering radius must be positive");
  std::vector<std::tuple<long long, long long, long long>> cells;
  cells.reserve(points.size());
  const double sp = 2.0 * r;   // spatial pitch: one cylinder spans 2r per axis
  const double tp = r * r;     // temporal pitch: one cylinder spans r^2
  for (const auto& p : points) {
    const long long i0 = static_cast<long long>(std::floor(p.x[0] / sp));
    const long long i1 = n > 1 ? static_cast<long long>(std::floor(p.x[1] / sp)) : 0;
    const long long j = static_cast<long long>(std::floor(p.t / tp));
    cells.emplace_back(i0, i1, j);
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells.size();
}

DimensionEstimate parabolic_dimension(const std::vector<SpaceTimePoint>& points, int n,
                                      const std::vector<double>& radii) {
  if (radii.size() < 3) throw config_error("dimension fit needs at least 3 radii");
  const auto [lo_it, hi_it] = std::minmax_element(radii.begin(), radii.end());
  if (!(*hi_it / *lo_it >= 10.0 * (1.0 - 1e-12))) {
    throw config_error("dimension fit radii must span at least one decade");
  }

  DimensionEstimate est;
  est.radii = radii;
  std::sort(est.radii.begin(), est.radii.end());
  if (points.empty()) {
    est.empty_set = true;
    est.counts.assign(est.radii.size(), 0);
    est.dimension = 0.0;
    return est;
  }
  std::vector<double> lx, ly;
  for (double r : est.radii) {
    const size_t cnt = parabolic_covering_count(points, n, r);
    est.counts.push_back(cnt);
    lx.push_back(std::log(1.0 / r));
    ly.push_back(std::log(static_cast<double>(cnt)));
  }
  est.dimension = fit_slope(lx, ly, &est.fit_residual);
  return est;
}

Theorem1Budget theorem1_budget(double alpha, double p, int n) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw config_error("alpha must lie in (0, 1]");
  if (!(p > 2.0)) throw config_error("p must exceed 2");
  const double budget = std::min(0.5 * alpha, 0.5 - 1.0 / p);
  Theorem1Budget b;
  b.beta = 0.5 * budget;
  b.epsilon = 0.25 * budget;
  b.dimension_bound = n + 2.0 - 2.0 * b.beta;
  return b;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y, double* residual) {
  if (x.size() != y.size() || x.size() < 2) {
    if (residual) *residual = 0.0;
    return std::numeric_limits<double>::infinity();
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    if (residual) *residual = 0.0;
    return std::numeric_limits<double>::infinity();
  }
  const double slope = sxy / sxx;
  if (residual) {
    double rss = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double pred = my + slope * (x[i] - mx);
      rss += (y[i] - pred) * (y[i] - pred);
    }
    *residual = std::sqrt(rss / x.size());
  }
  return slope;
}

}  // namespace dnf
