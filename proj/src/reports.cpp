#include "dnf/reports.hpp"

#include <cmath>
#include <cstdio>

namespace dnf {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_energy_csv(std::ostream& os, const EnergyLedger& ledger) {
  os << "k,t,potential,dissipation,dual,d_k,e_k,d_pass,e_pass\n";
  for (const auto& e : ledger.entries) {
    os << e.k << "," << format_g17(e.t) << "," << format_g17(e.potential) << ","
       << format_g17(e.dissipation) << "," << format_g17(e.dual) << "," << format_g17(e.d_defect)
       << ",";
    if (e.has_e) {
      os << format_g17(e.e_defect);
    }
    os << "," << (e.d_pass ? 1 : 0) << ",";
    if (e.has_e) {
      os << (e.e_pass ? 1 : 0);
    }
    os << "\n";
  }
}

std::vector<SpaceTimePoint> admissible_center_grid(const Trajectory& traj, double r, int nx,
                                                   int nt) {
  const BoxDomain& dom = traj.domain;
  std::vector<SpaceTimePoint> centers;
  const double half_t = 0.5 * r * r;
  const double t_min = half_t;
  const double t_max = traj.horizon() - half_t;
  if (t_max <= t_min) return centers;

  std::vector<std::vector<double>> axis_positions(dom.n);
  for (int d = 0; d < dom.n; ++d) {
    const double a = dom.lo[d] + r;
    const double b = dom.hi[d] - r;
    if (b <= a) return centers;
    for (int i = 0; i < nx; ++i) {
      axis_positions[d].push_back(a + (b - a) * (i + 0.5) / nx);
    }
  }
  std::vector<double> times;
  for (int j = 0; j < nt; ++j) times.push_back(t_min + (t_max - t_min) * (j + 0.5) / nt);

  // axis-0 major sweep, fixed order
  if (dom.n == 1) {
    for (double x0 : axis_positions[0]) {
      for (double t : times) centers.push_back({{x0, 0.0}, t});
    }
  } else {
    for (double x0 : axis_positions[0]) {
      for (double x1 : axis_positions[1]) {
        for (double t : times) centers.push_back({{x0, x1}, t});
      }
    }
  }
  return centers;
}

void write_regularity_map_csv(std::ostream& os, const TrajectoryAnalytics& an,
                              const std::vector<SpaceTimePoint>& centers, double r,
                              const DecayParams& params, int scales) {
  const int n = an.trajectory().domain.n;
  if (n == 1) {
    os << "x,t,r,T1,T2,T3,E,flag\n";
  } else {
    os << "x0,x1,t,r,T1,T2,T3,E,flag\n";
  }
  for (const auto& c : centers) {
    ParabolicCylinder cyl;
    cyl.x = c.x;
    cyl.t = c.t;
    cyl.r = r;
    LocalEnergySample s;
    DecayEvidence ev;
    try {
      s = local_energy(an, cyl);
      ev = decay_classification(an, c.x, c.t, r, params, scales);
    } catch (const geometry_error&) {
      continue;
    }
    for (int d = 0; d < n; ++d) os << format_g17(c.x[d]) << ",";
    os << format_g17(c.t) << "," << format_g17(r) << "," << format_g17(s.T1) << ","
       << format_g17(s.T2) << "," << format_g17(s.T3) << "," << format_g17(s.E()) << ","
       << (ev.flag == DecayFlag::Regular ? "regular" : "unverified") << "\n";
  }
}

void write_dimension_csv(std::ostream& os, const DimensionEstimate& est) {
  os << "r,count\n";
  for (size_t i = 0; i < est.radii.size(); ++i) {
    os << format_g17(est.radii[i]) << "," << est.counts[i] << "\n";
  }
  os << "dimension," << format_g17(est.dimension) << "\n";
  os << "fit_residual," << format_g17(est.fit_residual) << "\n";
  if (est.empty_set) os << "empty_set,1\n";
}

void write_frac_csv(std::ostream& os, const FractionalQuotients& fq) {
  os << "h,D\n";
  for (size_t i = 0; i < fq.h.size(); ++i) {
    os << format_g17(fq.h[i]) << "," << format_g17(fq.D[i]) << "\n";
  }
  if (std::isinf(fq.slope)) {
    os << "slope,inf\n";
  } else {
    os << "slope," << format_g17(fq.slope) << "\n";
  }
}

}  // namespace dnf
