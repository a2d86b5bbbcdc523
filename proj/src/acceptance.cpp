#include "dnf/acceptance.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "dnf/energy.hpp"
#include "dnf/regularity.hpp"
#include "dnf/reports.hpp"
#include "dnf/run_config.hpp"
#include "dnf/trajectory_io.hpp"

namespace dnf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

RunConfig base_config() {
  RunConfig cfg;
  cfg.n = 1;
  cfg.lo = {0.0, 0.0};
  cfg.hi = {1.0, 0.0};
  cfg.cells = {99, 0};
  cfg.T = 0.1;
  cfg.N = 100;
  cfg.m = 1;
  cfg.profile = "eigenmode";
  cfg.amplitude = 1.0;
  cfg.solver.tol = 1e-10;
  return cfg;
}

Trajectory solve_config(const RunConfig& cfg) {
  auto [psi, F] = build_potentials(cfg);
  return run_scheme(initial_datum(cfg), psi, F, cfg.psi, cfg.F, cfg.N, cfg.T, cfg.solver);
}

// Everything the criteria share: the unit-amplitude quadratic run (with its
// coarser time steps), the soft-quadratic run, and a small-amplitude smooth
// run whose magnitudes sit inside the default decay-entry window.
struct Suite {
  RunConfig cfg_quad, cfg_soft, cfg_smooth;
  Trajectory quad, quad_n50, quad_n25, soft, smooth;
  ScalarPotential psi_quad, psi_soft;
  MatrixPotential F_quad, F_soft;
  std::unique_ptr<TrajectoryAnalytics> an_quad, an_soft, an_smooth;
  double build_seconds = 0.0;

  Suite() {
    const auto t0 = Clock::now();
    cfg_quad = base_config();

    cfg_soft = cfg_quad;
    cfg_soft.psi.family = "soft-quadratic";
    cfg_soft.psi.epsilon = 0.5;
    cfg_soft.F.family = "soft-quadratic";
    cfg_soft.F.epsilon = 0.5;

    cfg_smooth = cfg_quad;
    cfg_smooth.amplitude = 0.02;

    quad = solve_config(cfg_quad);
    RunConfig c50 = cfg_quad;
    c50.N = 50;
    RunConfig c25 = cfg_quad;
    c25.N = 25;
    quad_n50 = solve_config(c50);
    quad_n25 = solve_config(c25);
    soft = solve_config(cfg_soft);
    smooth = solve_config(cfg_smooth);

    psi_quad = make_scalar_potential(cfg_quad.psi, 1);
    F_quad = make_matrix_potential(cfg_quad.F, 1, 1);
    psi_soft = make_scalar_potential(cfg_soft.psi, 1);
    F_soft = make_matrix_potential(cfg_soft.F, 1, 1);

    an_quad = std::make_unique<TrajectoryAnalytics>(quad);
    an_soft = std::make_unique<TrajectoryAnalytics>(soft);
    an_smooth = std::make_unique<TrajectoryAnalytics>(smooth);
    build_seconds = seconds_since(t0);
  }
};

std::string fmt(double v) { return format_g17(v); }

// --- criterion 1: closed-form decay and temporal order ----------------------

CriterionResult criterion_heat_exactness(const Suite& s) {
  CriterionResult res{1, "heat-system exactness", false, ""};
  const auto t0 = Clock::now();
  const Trajectory& traj = s.quad;
  const BoxDomain& dom = traj.domain;
  const double h = dom.h(0);
  const double disc_eig = (2.0 - 2.0 * std::cos(M_PI * h)) / (h * h);
  const double decay = 1.0 / (1.0 + disc_eig * traj.tau);

  double worst = 0.0;
  for (int k = 1; k <= traj.steps(); ++k) {
    const double scale = std::pow(decay, k);
    for (int q = 0; q < dom.node_count(); ++q) {
      const double x = dom.node_coord(dom.unflat(q))[0];
      worst = std::max(worst, std::abs(traj.snapshots[k].at(q, 0) - scale * std::sin(M_PI * x)));
    }
  }
  const bool formula_ok = worst <= 10.0 * traj.solver_tol;

  std::vector<double> log_tau, log_err;
  for (const Trajectory* run : {&s.quad_n25, &s.quad_n50, &s.quad}) {
    const double T = run->horizon();
    double err = 0.0;
    const SnapshotField& last = run->snapshots.back();
    for (int q = 0; q < dom.node_count(); ++q) {
      const double x = dom.node_coord(dom.unflat(q))[0];
      const double exact = std::exp(-M_PI * M_PI * T) * std::sin(M_PI * x);
      err = std::max(err, std::abs(last.at(q, 0) - exact));
    }
    log_tau.push_back(std::log(run->tau));
    log_err.push_back(std::log(err));
  }
  const double order = fit_slope(log_tau, log_err);
  const bool order_ok = order >= 0.9 && order <= 1.1;

  const double elapsed = seconds_since(t0) + s.build_seconds;
  const bool time_ok = elapsed < 10.0;
  res.pass = formula_ok && order_ok && time_ok;
  res.detail = "max formula error " + fmt(worst) + " (cap " + fmt(10.0 * traj.solver_tol) +
               "), temporal order " + fmt(order) + ", elapsed " + fmt(elapsed) + " s";
  return res;
}

// --- criterion 2: one-step identities ---------------------------------------

CriterionResult criterion_identities(const Suite& s) {
  CriterionResult res{2, "discrete identity suite", false, ""};
  const EnergyLedger lq = build_energy_ledger(s.quad, s.psi_quad, s.F_quad);
  const EnergyLedger ls = build_energy_ledger(s.soft, s.psi_soft, s.F_soft);
  const bool defects_ok = lq.all_d_pass() && lq.all_e_pass() && ls.all_d_pass() && ls.all_e_pass();
  const double tel = std::max(lq.telescoping_error(), ls.telescoping_error());
  res.pass = defects_ok && tel <= 1e-12;
  res.detail = std::string("defects ") + (defects_ok ? "within slack" : "VIOLATED") +
               ", telescoping error " + fmt(tel);
  return res;
}

// --- criterion 3: summed a-priori bounds ------------------------------------

CriterionResult criterion_global_bounds(const Suite& s) {
  CriterionResult res{3, "global bounds", false, ""};
  const BoundCheck b1q = discrete_bound1_check(s.quad, s.psi_quad, s.F_quad);
  const BoundCheck b1s = discrete_bound1_check(s.soft, s.psi_soft, s.F_soft);
  const double d = s.quad.horizon() / 4.0;
  const BoundCheck b2q = discrete_bound2_check(s.quad, s.psi_quad, s.F_quad, d);
  const BoundCheck b2s = discrete_bound2_check(s.soft, s.psi_soft, s.F_soft, d);

  const bool constants_ok = b1q.constant == 1.5 && b1s.constant == 2.25;
  res.pass = constants_ok && b1q.pass && b1s.pass && b2q.pass && b2s.pass;
  res.detail = "C1(quad) = " + fmt(b1q.constant) + ", C1(soft) = " + fmt(b1s.constant) +
               ", bound1 ratios " + fmt(b1q.lhs / b1q.rhs) + "/" + fmt(b1s.lhs / b1s.rhs) +
               ", bound2 ratios " + fmt(b2q.lhs / b2q.rhs) + "/" + fmt(b2s.lhs / b2s.rhs);
  return res;
}

// --- criterion 4: step-solver oracle ----------------------------------------

// Hand-assembled gradient descent for the 3-node instance: soft scalar
// potential (epsilon 1/2), quadratic matrix potential, zero boundary.
std::array<double, 3> descent_oracle(const std::array<double, 3>& v_prev, double h, double tau,
                                     double eps) {
  auto dpsi = [eps](double w) { return w + eps * w / std::sqrt(1.0 + w * w); };
  std::array<double, 3> v = v_prev;
  const double lip = h * ((1.0 + eps) / tau + 4.0 / (h * h));
  const double step = 1.0 / lip;
  for (int it = 0; it < 400000; ++it) {
    std::array<double, 3> g{};
    double norm2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double left = i == 0 ? 0.0 : v[i - 1];
      const double right = i == 2 ? 0.0 : v[i + 1];
      g[i] = h * (dpsi((v[i] - v_prev[i]) / tau) + (2.0 * v[i] - left - right) / (h * h));
      norm2 += g[i] * g[i];
    }
    if (std::sqrt(norm2) <= 1e-12) break;
    for (int i = 0; i < 3; ++i) v[i] -= step * g[i];
  }
  return v;
}

CriterionResult criterion_step_oracle(const Suite&) {
  CriterionResult res{4, "step-solver oracle", false, ""};

  // 3 interior nodes on (0, 0.4): h = 0.1, tau = h^2 = 0.01.
  const BoxDomain dom3(1, {0.0, 0.0}, {0.4, 0.0}, {3, 0});
  const double tau = 0.01;
  PotentialSpec soft_spec;
  soft_spec.family = "soft-quadratic";
  soft_spec.epsilon = 0.5;
  const ScalarPotential psi = make_scalar_potential(soft_spec, 1);
  const MatrixPotential F = make_matrix_potential(PotentialSpec{}, 1, 1);
  SnapshotField prev3(dom3, 1);
  for (int q = 0; q < 3; ++q) prev3.at(q, 0) = 1.0;
  SolverConfig cfg;
  cfg.tol = 1e-12;
  const auto [v3, rep3] = solve_step(prev3, tau, psi, F, cfg);
  const auto oracle = descent_oracle({1.0, 1.0, 1.0}, dom3.h(0), tau, 0.5);
  double diff = 0.0;
  for (int q = 0; q < 3; ++q) diff = std::max(diff, std::abs(v3.at(q, 0) - oracle[q]));

  // single interior node on (0, 0.2): closed form 1 / (1 + 2 tau / h^2).
  const BoxDomain dom1(1, {0.0, 0.0}, {0.2, 0.0}, {1, 0});
  const ScalarPotential psi_q = make_scalar_potential(PotentialSpec{}, 1);
  SnapshotField prev1(dom1, 1);
  prev1.at(0, 0) = 1.0;
  const auto [v1, rep1] = solve_step(prev1, tau, psi_q, F, cfg);
  const double closed = 1.0 / (1.0 + 2.0 * tau / (dom1.h(0) * dom1.h(0)));
  const double closed_err = std::abs(v1.at(0, 0) - closed);

  res.pass = diff <= 1e-8 && closed_err <= 1e-12;
  res.detail = "descent-oracle gap " + fmt(diff) + ", closed-form gap " + fmt(closed_err);
  return res;
}

// --- criterion 5: conjugate and certification suite --------------------------

CriterionResult criterion_potentials(const Suite&) {
  CriterionResult res{5, "conjugate/certification suite", false, ""};

  PotentialSpec soft_spec;
  soft_spec.family = "soft-quadratic";
  soft_spec.epsilon = 0.5;
  PotentialSpec aniso_spec;
  aniso_spec.family = "aniso-quadratic";
  aniso_spec.diag = {0.5, 2.0};

  const ScalarPotential quad = make_scalar_potential(PotentialSpec{}, 2);
  const ScalarPotential soft = make_scalar_potential(soft_spec, 2);
  const ScalarPotential aniso = make_scalar_potential(aniso_spec, 2);

  double worst_round = 0.0, worst_fenchel = 0.0;
  std::mt19937_64 rng(20240511);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd w(2);
    w << gauss(rng), gauss(rng);
    if (w.norm() > 0) w *= 10.0 * unif(rng) / w.norm();
    for (const ScalarPotential* p : {&quad, &soft, &aniso}) {
      const Eigen::VectorXd z = p->gradient(w);
      const Eigen::VectorXd back = legendre_dual_grad(*p, z, 1e-12);
      worst_round = std::max(worst_round, (back - w).norm());
      const double fen = p->value(w) + legendre_value(*p, z, 1e-12) - z.dot(w);
      worst_fenchel = std::max(worst_fenchel, std::abs(fen));
    }
  }

  bool certs_ok = verify_bounds(quad, 400, 5.0, 7).pass && verify_bounds(soft, 400, 5.0, 7).pass &&
                  verify_bounds(aniso, 400, 5.0, 7).pass;
  certs_ok = certs_ok && verify_bounds(make_matrix_potential(soft_spec, 1, 2), 400, 5.0, 7).pass;

  PotentialSpec planted;  // quadratic claiming a lower constant above 1
  planted.has_bounds_override = true;
  planted.bounds_override.theta = 1.1;
  planted.bounds_override.Theta = 1.1;
  const BoundsReport bad = verify_bounds(make_scalar_potential(planted, 2), 400, 5.0, 7);

  res.pass = worst_round <= 1e-8 && worst_fenchel <= 1e-8 && certs_ok && !bad.pass;
  res.detail = "round trip " + fmt(worst_round) + ", conjugate identity " + fmt(worst_fenchel) +
               ", planted fixture " + (bad.pass ? "MISSED" : "caught");
  return res;
}

// --- criterion 6: two-scale decay lemma -------------------------------------

CriterionResult criterion_backwards_decay(const Suite& s) {
  CriterionResult res{6, "unconditional lemma checks", false, ""};
  const double exact_factor = backwards_decay_factor(1, 0.25);
  const bool factor_ok = exact_factor == 786432.0;

  std::mt19937_64 rng(991);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int checked = 0;
  bool all_pass = true;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const TrajectoryAnalytics* an : {s.an_quad.get(), s.an_soft.get()}) {
    const Trajectory& traj = an->trajectory();
    int count = 0;
    while (count < 200) {
      ParabolicCylinder cyl;
      cyl.r = 0.16 + 0.12 * unif(rng);
      cyl.x = {cyl.r + 0.01 + (0.98 - 2.0 * cyl.r) * unif(rng), 0.0};
      const double ht = 0.5 * cyl.r * cyl.r;
      const double lo = ht + 2.0 * traj.tau;
      const double hi = traj.horizon() - ht - 2.0 * traj.tau;
      cyl.t = lo + (hi - lo) * unif(rng);
      DecayCheck chk;
      try {
        chk = backwards_decay_check(*an, cyl, 0.5);
      } catch (const geometry_error&) {
        continue;
      }
      all_pass = all_pass && chk.pass;
      min_margin = std::min(min_margin, chk.margin());
      ++count;
      ++checked;
    }
  }
  res.pass = factor_ok && all_pass && checked == 400;
  res.detail = "factor(n=1, 1/4) = " + fmt(exact_factor) + ", cylinders checked " +
               std::to_string(checked) + ", min margin " + fmt(min_margin);
  return res;
}

// --- criterion 7: regularity of smooth runs ----------------------------------

CriterionResult criterion_regularity(const Suite& s, const std::filesystem::path& outdir) {
  CriterionResult res{7, "regularity of smooth runs", false, ""};
  const TrajectoryAnalytics& an = *s.an_smooth;
  const DecayParams params = thresholds(0.1, 0.5, 0.25, 10.0, 0.75, 1, 1.0);
  const double r0 = 0.22;

  const std::vector<SpaceTimePoint> centers = admissible_center_grid(s.smooth, r0, 11, 9);
  int regular = 0, total = 0;
  int scale_checked_somewhere = 0;
  for (const auto& c : centers) {
    DecayEvidence ev;
    try {
      ev = decay_classification(an, c.x, c.t, r0, params, 2);
    } catch (const geometry_error&) {
      continue;
    }
    ++total;
    if (ev.flag == DecayFlag::Regular) ++regular;
    scale_checked_somewhere = std::max(scale_checked_somewhere, ev.scales_checked);
  }
  const double frac = total > 0 ? static_cast<double>(regular) / total : 0.0;
  const bool sweep_ok = total > 0 && frac >= 0.99 && scale_checked_somewhere >= 1;

  // local-energy decay exponent at sampled interior points
  const std::vector<double> radii{0.12, 0.17, 0.24};
  double worst_exp = std::numeric_limits<double>::infinity();
  for (double x : {0.35, 0.5, 0.65}) {
    for (double t : {0.035, 0.05, 0.065}) {
      std::vector<double> lr, le;
      for (double r : radii) {
        ParabolicCylinder cyl{{x, 0.0}, t, r};
        const LocalEnergySample e = local_energy(an, cyl);
        if (e.E() > 0.0) {
          lr.push_back(std::log(r));
          le.push_back(std::log(e.E()));
        }
      }
      if (lr.size() >= 2) worst_exp = std::min(worst_exp, fit_slope(lr, le));
    }
  }
  const bool exp_ok = worst_exp >= 1.5;

  SpaceTimeRegion region;
  region.xlo = {0.2, 0.0};
  region.xhi = {0.8, 0.0};
  region.t0 = 0.02;
  region.t1 = 0.06;
  const std::vector<double> hs{s.smooth.tau, 2 * s.smooth.tau, 4 * s.smooth.tau, 8 * s.smooth.tau};
  const FractionalQuotients fq_vt =
      fractional_quotient_exponent(an, FieldKind::TimeDerivative, region, hs);
  const FractionalQuotients fq_d2 =
      fractional_quotient_exponent(an, FieldKind::SecondGradient, region, hs);
  const bool slopes_ok = fq_vt.slope >= 1.8 && fq_vt.slope <= 2.2 && fq_d2.slope >= 1.8 &&
                         fq_d2.slope <= 2.2;
  // floors the slopes must dominate: 1/2 - 1/p = 0.25 at p = 4 and alpha/2 = 0.5
  const bool floors_ok = fq_vt.slope >= 0.5 - 1.0 / p_for_dimension(1) && fq_d2.slope >= 0.5;

  {
    std::ofstream os(outdir / "regularity_map.csv", std::ios::trunc);
    write_regularity_map_csv(os, an, centers, r0, params, 2);
  }

  res.pass = sweep_ok && exp_ok && slopes_ok && floors_ok;
  res.detail = "regular " + std::to_string(regular) + "/" + std::to_string(total) +
               ", min E-exponent " + fmt(worst_exp) + ", slopes vt " + fmt(fq_vt.slope) +
               " / d2v " + fmt(fq_d2.slope);
  return res;
}

// --- criterion 8: dimension estimator fixtures -------------------------------

CriterionResult criterion_dimension(const Suite&, const std::filesystem::path& outdir) {
  CriterionResult res{8, "dimension estimator fixtures", false, ""};
  const auto t0 = Clock::now();

  const std::vector<double> point_radii{0.01, 0.02, 0.05, 0.1, 0.25};
  const std::vector<SpaceTimePoint> one_point{{{0.5, 0.0}, 0.05}};
  const DimensionEstimate d_point = parabolic_dimension(one_point, 1, point_radii);

  std::vector<SpaceTimePoint> slice;
  for (int i = 1; i < 2000; ++i) slice.push_back({{i / 2000.0, 0.0}, 0.05});
  const std::vector<double> slice_radii{0.006, 0.009, 0.014, 0.021, 0.032,
                                        0.05,  0.08,  0.12,  0.19};
  const DimensionEstimate d_slice = parabolic_dimension(slice, 1, slice_radii);

  std::vector<SpaceTimePoint> box;
  box.reserve(400 * 5000);
  for (int i = 0; i < 400; ++i) {
    for (int j = 0; j < 5000; ++j) {
      box.push_back({{4.0 * (i + 0.5) / 400.0, 0.0}, (j + 0.5) / 5000.0});
    }
  }
  const std::vector<double> box_radii{0.02, 0.028, 0.04, 0.057, 0.08, 0.113, 0.16, 0.29};
  const DimensionEstimate d_box = parabolic_dimension(box, 1, box_radii);

  auto drop_finest = [](const std::vector<double>& radii) {
    std::vector<double> out(radii.begin() + 1, radii.end());
    return out;
  };
  const DimensionEstimate d_point2 =
      parabolic_dimension(one_point, 1, drop_finest(point_radii));
  const DimensionEstimate d_slice2 = parabolic_dimension(slice, 1, drop_finest(slice_radii));
  const DimensionEstimate d_box2 = parabolic_dimension(box, 1, drop_finest(box_radii));

  const bool values_ok = std::abs(d_point.dimension - 0.0) <= 0.05 &&
                         std::abs(d_slice.dimension - 1.0) <= 0.15 &&
                         std::abs(d_box.dimension - 3.0) <= 0.2;
  const bool stable_ok = std::abs(d_point.dimension - d_point2.dimension) <= 0.05 &&
                         std::abs(d_slice.dimension - d_slice2.dimension) <= 0.05 &&
                         std::abs(d_box.dimension - d_box2.dimension) <= 0.05;
  const double elapsed = seconds_since(t0);

  {
    std::ofstream os(outdir / "dimension_slice.csv", std::ios::trunc);
    write_dimension_csv(os, d_slice);
  }

  res.pass = values_ok && stable_ok && elapsed < 30.0;
  res.detail = "dims " + fmt(d_point.dimension) + " / " + fmt(d_slice.dimension) + " / " +
               fmt(d_box.dimension) + ", elapsed " + fmt(elapsed) + " s";
  return res;
}

// --- criterion 9: threshold arithmetic ---------------------------------------

CriterionResult criterion_thresholds(const Suite&) {
  CriterionResult res{9, "threshold arithmetic", false, ""};
  const DecayParams p = thresholds(0.1, 0.5, 0.25, 1.0, 0.75, 1, 1.0);
  const Theorem1Budget b = theorem1_budget(1.0, 4.0, 1);
  res.pass = p.epsilon1 == 0.015625 && p.mu == 0.25 && b.dimension_bound == 2.75;
  res.detail = "epsilon1 = " + fmt(p.epsilon1) + ", mu = " + fmt(p.mu) + ", dim bound = " +
               fmt(b.dimension_bound);
  return res;
}

// --- criterion 10: determinism ------------------------------------------------

std::string report_bundle(const Suite& s) {
  std::ostringstream os;

  const Trajectory quad = solve_config(s.cfg_quad);
  const ScalarPotential psi = make_scalar_potential(s.cfg_quad.psi, 1);
  const MatrixPotential F = make_matrix_potential(s.cfg_quad.F, 1, 1);
  write_energy_csv(os, build_energy_ledger(quad, psi, F));

  const Trajectory smooth = solve_config(s.cfg_smooth);
  const TrajectoryAnalytics an(smooth);
  const DecayParams params = thresholds(0.1, 0.5, 0.25, 10.0, 0.75, 1, 1.0);
  write_regularity_map_csv(os, an, admissible_center_grid(smooth, 0.22, 11, 9), 0.22, params, 2);

  std::vector<SpaceTimePoint> slice;
  for (int i = 1; i < 2000; ++i) slice.push_back({{i / 2000.0, 0.0}, 0.05});
  write_dimension_csv(os, parabolic_dimension(slice, 1,
                                              {0.006, 0.009, 0.014, 0.021, 0.032, 0.05, 0.08,
                                               0.12, 0.19}));

  SpaceTimeRegion region;
  region.xlo = {0.2, 0.0};
  region.xhi = {0.8, 0.0};
  region.t0 = 0.02;
  region.t1 = 0.06;
  write_frac_csv(os, fractional_quotient_exponent(an, FieldKind::TimeDerivative, region,
                                                  {smooth.tau, 2 * smooth.tau, 4 * smooth.tau,
                                                   8 * smooth.tau}));
  return os.str();
}

CriterionResult criterion_determinism(const Suite& s, const std::filesystem::path& outdir) {
  CriterionResult res{10, "determinism", false, ""};
  const std::string a = report_bundle(s);
  const std::string b = report_bundle(s);
  {
    std::ofstream oa(outdir / "determinism_a.csv", std::ios::trunc);
    oa << a;
    std::ofstream ob(outdir / "determinism_b.csv", std::ios::trunc);
    ob << b;
  }
  res.pass = !a.empty() && a == b;
  res.detail = std::to_string(a.size()) + " bytes, " +
               (res.pass ? "byte-identical" : "runs DIFFER");
  return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::filesystem::path& outdir,
                                            std::ostream& log) {
  std::filesystem::create_directories(outdir);
  Suite suite;

  std::vector<CriterionResult> results;
  results.push_back(criterion_heat_exactness(suite));
  results.push_back(criterion_identities(suite));
  results.push_back(criterion_global_bounds(suite));
  results.push_back(criterion_step_oracle(suite));
  results.push_back(criterion_potentials(suite));
  results.push_back(criterion_backwards_decay(suite));
  results.push_back(criterion_regularity(suite, outdir));
  results.push_back(criterion_dimension(suite, outdir));
  results.push_back(criterion_thresholds(suite));
  results.push_back(criterion_determinism(suite, outdir));

  {
    std::ofstream os(outdir / "energy_quad.csv", std::ios::trunc);
    write_energy_csv(os, build_energy_ledger(suite.quad, suite.psi_quad, suite.F_quad));
    std::ofstream os2(outdir / "energy_soft.csv", std::ios::trunc);
    write_energy_csv(os2, build_energy_ledger(suite.soft, suite.psi_soft, suite.F_soft));
  }

  for (const auto& r : results) {
    log << "criterion " << r.id << " (" << r.name << "): " << (r.pass ? "PASS" : "FAIL") << " — "
        << r.detail << "\n";
  }
  return results;
}

}  // namespace dnf
