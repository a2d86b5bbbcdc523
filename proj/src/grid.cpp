#include "dnf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dnf {

BoxDomain::BoxDomain(int dim, std::array<double, kMaxDim> lo_, std::array<double, kMaxDim> hi_,
                     std::array<int, kMaxDim> cells_)
    : n(dim), lo(lo_), hi(hi_), cells(cells_) {
  if (n < 1 || n > kMaxDim) throw config_error("spatial dimension must be 1 or 2");
  for (int d = 0; d < n; ++d) {
    if (!(hi[d] > lo[d])) throw config_error("box extents must satisfy lo < hi");
    if (cells[d] < 1) throw config_error("need at least one interior node per axis");
  }
  for (int d = n; d < kMaxDim; ++d) {
    lo[d] = 0.0;
    hi[d] = 0.0;
    cells[d] = 0;
  }
}

double BoxDomain::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < n; ++d) v *= h(d);
  return v;
}

int BoxDomain::node_count() const {
  int c = 1;
  for (int d = 0; d < n; ++d) c *= cells[d];
  return c;
}

int BoxDomain::flat(const std::array<int, kMaxDim>& idx) const {
  int f = idx[0];
  for (int d = 1; d < n; ++d) f = f * cells[d] + idx[d];
  return f;
}

std::array<int, kMaxDim> BoxDomain::unflat(int flat_idx) const {
  std::array<int, kMaxDim> idx{0, 0};
  for (int d = n - 1; d >= 0; --d) {
    idx[d] = flat_idx % cells[d];
    flat_idx /= cells[d];
  }
  return idx;
}

std::array<double, kMaxDim> BoxDomain::node_coord(const std::array<int, kMaxDim>& idx) const {
  std::array<double, kMaxDim> x{0.0, 0.0};
  for (int d = 0; d < n; ++d) x[d] = lo[d] + (idx[d] + 1) * h(d);
  return x;
}

SnapshotField::SnapshotField(const BoxDomain& dom, int m_)
    : domain(dom), m(m_), values(static_cast<size_t>(dom.node_count()) * m_, 0.0) {
  if (m < 1) throw config_error("field needs m >= 1 components");
}

void SnapshotField::check_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) throw config_error("snapshot contains a non-finite entry");
  }
}

void Trajectory::validate() const {
  if (snapshots.empty()) throw config_error("trajectory has no snapshots");
  if (!(tau > 0.0)) throw config_error("trajectory needs tau > 0");
  for (const auto& s : snapshots) {
    if (!(s.domain == domain) || s.m != m) {
      throw config_error("trajectory snapshots disagree on domain or components");
    }
    s.check_finite();
  }
}

namespace {

// Value with the zero Dirichlet trace filled in outside the interior lattice.
// `idx` is in interior coordinates, may step one node outside.
inline double extended(const SnapshotField& f, std::array<int, kMaxDim> idx, int comp) {
  for (int d = 0; d < f.domain.n; ++d) {
    if (idx[d] < 0 || idx[d] >= f.domain.cells[d]) return 0.0;
  }
  return f.at(f.domain.flat(idx), comp);
}

}  // namespace

GradientField gradient(const SnapshotField& field) {
  const BoxDomain& dom = field.domain;
  GradientField g;
  g.m = field.m;
  g.n = dom.n;
  g.values.assign(static_cast<size_t>(dom.node_count()) * field.m * dom.n, 0.0);
  const int nodes = dom.node_count();
  for (int q = 0; q < nodes; ++q) {
    const auto idx = dom.unflat(q);
    for (int i = 0; i < field.m; ++i) {
      for (int j = 0; j < dom.n; ++j) {
        auto up = idx, dn = idx;
        up[j] += 1;
        dn[j] -= 1;
        const double der = (extended(field, up, i) - extended(field, dn, i)) / (2.0 * dom.h(j));
        g.values[(static_cast<size_t>(q) * field.m + i) * dom.n + j] = der;
      }
    }
  }
  return g;
}

HessianField hessian_field(const SnapshotField& field) {
  const BoxDomain& dom = field.domain;
  HessianField hss;
  hss.m = field.m;
  hss.n = dom.n;
  hss.values.assign(static_cast<size_t>(dom.node_count()) * field.m * dom.n * dom.n, 0.0);
  const int nodes = dom.node_count();
  for (int q = 0; q < nodes; ++q) {
    const auto idx = dom.unflat(q);
    for (int i = 0; i < field.m; ++i) {
      for (int j = 0; j < dom.n; ++j) {
        for (int k = j; k < dom.n; ++k) {
          double der;
          if (j == k) {
            auto up = idx, dn = idx;
            up[j] += 1;
            dn[j] -= 1;
            der = (extended(field, up, i) - 2.0 * field.at(q, i) + extended(field, dn, i)) /
                  (dom.h(j) * dom.h(j));
          } else {
            auto pp = idx, pm = idx, mp = idx, mm = idx;
            pp[j] += 1; pp[k] += 1;
            pm[j] += 1; pm[k] -= 1;
            mp[j] -= 1; mp[k] += 1;
            mm[j] -= 1; mm[k] -= 1;
            der = (extended(field, pp, i) - extended(field, pm, i) - extended(field, mp, i) +
                   extended(field, mm, i)) /
                  (4.0 * dom.h(j) * dom.h(k));
          }
          const size_t base = (static_cast<size_t>(q) * field.m + i);
          hss.values[(base * dom.n + j) * dom.n + k] = der;
          hss.values[(base * dom.n + k) * dom.n + j] = der;
        }
      }
    }
  }
  return hss;
}

SnapshotField time_derivative(const Trajectory& traj, int k) {
  if (k < 1 || k > traj.steps()) {
    throw config_error("time_derivative step index out of range: " + std::to_string(k));
  }
  SnapshotField out(traj.domain, traj.m);
  const auto& cur = traj.snapshots[k].values;
  const auto& prev = traj.snapshots[k - 1].values;
  for (size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = (cur[i] - prev[i]) / traj.tau;
  }
  return out;
}

double integrate_space(const SnapshotField& field, int comp) {
  const double vol = field.domain.cell_volume();
  double sum = 0.0;
  const int nodes = field.domain.node_count();
  for (int q = 0; q < nodes; ++q) sum += field.at(q, comp);
  return vol * sum;
}

double integrate_space(const BoxDomain& domain, const std::vector<double>& node_values) {
  if (static_cast<int>(node_values.size()) != domain.node_count()) {
    throw config_error("integrate_space: value count does not match node count");
  }
  double sum = 0.0;
  for (double v : node_values) sum += v;
  return domain.cell_volume() * sum;
}

CylinderPoints cylinder_points(const Trajectory& traj, const ParabolicCylinder& cyl) {
  const BoxDomain& dom = traj.domain;
  if (!(cyl.r > 0.0)) throw geometry_error("cylinder radius must be positive", "radius");
  const double half_t = 0.5 * cyl.r * cyl.r;
  for (int d = 0; d < dom.n; ++d) {
    if (cyl.x[d] - cyl.r < dom.lo[d] || cyl.x[d] + cyl.r > dom.hi[d]) {
      throw geometry_error("cylinder leaves the spatial domain", "x" + std::to_string(d));
    }
  }
  if (cyl.t - half_t < 0.0 || cyl.t + half_t > traj.horizon()) {
    throw geometry_error("cylinder leaves the time interval", "time");
  }

  CylinderPoints pts;
  const int nodes = dom.node_count();
  std::array<std::set<int>, kMaxDim> axis_coords;
  for (int q = 0; q < nodes; ++q) {
    const auto idx = dom.unflat(q);
    const auto x = dom.node_coord(idx);
    double dist2 = 0.0;
    for (int d = 0; d < dom.n; ++d) dist2 += (x[d] - cyl.x[d]) * (x[d] - cyl.x[d]);
    if (dist2 < cyl.r * cyl.r) {
      pts.nodes.push_back(q);
      for (int d = 0; d < dom.n; ++d) axis_coords[d].insert(idx[d]);
    }
  }
  for (int k = 1; k <= traj.steps(); ++k) {
    if (std::abs(traj.time(k) - cyl.t) < half_t) pts.steps.push_back(k);
  }

  for (int d = 0; d < dom.n; ++d) {
    if (static_cast<int>(axis_coords[d].size()) < 3) {
      throw geometry_error("cylinder resolves fewer than 3 nodes", "x" + std::to_string(d));
    }
  }
  if (static_cast<int>(pts.steps.size()) < 3) {
    throw geometry_error("cylinder resolves fewer than 3 time steps", "time");
  }
  return pts;
}

TrajectoryAnalytics::TrajectoryAnalytics(const Trajectory& traj) : traj_(&traj) {
  traj.validate();
  const int N = traj.steps();
  vt_.reserve(N);
  grad_.reserve(N + 1);
  hess_.reserve(N + 1);
  for (int k = 1; k <= N; ++k) vt_.push_back(time_derivative(traj, k));
  for (int k = 0; k <= N; ++k) {
    grad_.push_back(gradient(traj.snapshots[k]));
    hess_.push_back(hessian_field(traj.snapshots[k]));
  }
}

std::vector<double> TrajectoryAnalytics::cylinder_average(CylinderQuantity what,
                                                          const ParabolicCylinder& cyl) const {
  return cylinder_average(what, cylinder_points(*traj_, cyl));
}

std::vector<double> TrajectoryAnalytics::cylinder_average(CylinderQuantity what,
                                                          const CylinderPoints& pts) const {
  const int m = traj_->m;
  const int n = traj_->domain.n;
  int width = 0;
  switch (what) {
    case CylinderQuantity::TimeDerivative: width = m; break;
    case CylinderQuantity::Gradient: width = m * n; break;
    case CylinderQuantity::Hessian: width = m * n * n; break;
  }
  std::vector<double> acc(width, 0.0);
  for (int k : pts.steps) {
    for (int q : pts.nodes) {
      switch (what) {
        case CylinderQuantity::TimeDerivative:
          for (int c = 0; c < m; ++c) acc[c] += vt(k).at(q, c);
          break;
        case CylinderQuantity::Gradient: {
          const GradientField& g = grad(k);
          for (int c = 0; c < width; ++c) {
            acc[c] += g.values[static_cast<size_t>(q) * width + c];
          }
          break;
        }
        case CylinderQuantity::Hessian: {
          const HessianField& hs = hess(k);
          for (int c = 0; c < width; ++c) {
            acc[c] += hs.values[static_cast<size_t>(q) * width + c];
          }
          break;
        }
      }
    }
  }
  const double count = static_cast<double>(pts.count());
  for (double& v : acc) v /= count;
  return acc;
}

}  // namespace dnf
