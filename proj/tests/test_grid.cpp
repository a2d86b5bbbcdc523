#include <doctest.h>

#include <cmath>
#include <random>

#include "dnf/grid.hpp"

using namespace dnf;

namespace {

BoxDomain unit_line(int cells) { return BoxDomain(1, {0.0, 0.0}, {1.0, 0.0}, {cells, 0}); }

SnapshotField sample_1d(const BoxDomain& dom, double (*f)(double)) {
  SnapshotField field(dom, 1);
  for (int q = 0; q < dom.node_count(); ++q) {
    field.at(q, 0) = f(dom.node_coord(dom.unflat(q))[0]);
  }
  return field;
}

// trajectory with prescribed per-step scaling of a fixed profile
Trajectory scaled_profile_trajectory(const BoxDomain& dom, const SnapshotField& profile, int N,
                                     double tau, double (*scale)(int, double)) {
  Trajectory traj;
  traj.domain = dom;
  traj.m = profile.m;
  traj.tau = tau;
  for (int k = 0; k <= N; ++k) {
    SnapshotField s = profile;
    const double c = scale(k, tau);
    for (double& v : s.values) v *= c;
    traj.snapshots.push_back(std::move(s));
  }
  return traj;
}

}  // namespace

TEST_CASE("domain geometry") {
  const BoxDomain dom = unit_line(99);
  CHECK(dom.h(0) == doctest::Approx(0.01));
  CHECK(dom.node_count() == 99);
  CHECK(dom.node_coord({0, 0})[0] == doctest::Approx(0.01));
  CHECK(dom.node_coord({98, 0})[0] == doctest::Approx(0.99));

  const BoxDomain dom2(2, {0.0, -1.0}, {1.0, 1.0}, {9, 19});
  CHECK(dom2.node_count() == 9 * 19);
  CHECK(dom2.h(1) == doctest::Approx(0.1));
  CHECK(dom2.cell_volume() == doctest::Approx(0.01));
  const auto idx = dom2.unflat(dom2.flat({4, 7}));
  CHECK(idx[0] == 4);
  CHECK(idx[1] == 7);

  CHECK_THROWS_AS(BoxDomain(3, {0, 0}, {1, 1}, {5, 5}), config_error);
  CHECK_THROWS_AS(BoxDomain(1, {0, 0}, {0, 0}, {5, 0}), config_error);
  CHECK_THROWS_AS(BoxDomain(1, {0, 0}, {1, 0}, {0, 0}), config_error);
}

TEST_CASE("first differences: constants, linears, smooth error bound") {
  const BoxDomain dom = unit_line(99);

  const SnapshotField c = sample_1d(dom, [](double) { return 3.0; });
  const GradientField gc = gradient(c);
  for (int q = 1; q < 98; ++q) CHECK(gc.at(q, 0, 0) == doctest::Approx(0.0));

  const SnapshotField lin = sample_1d(dom, [](double x) { return x; });
  const GradientField gl = gradient(lin);
  for (int q = 1; q < 98; ++q) CHECK(gl.at(q, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  const SnapshotField s = sample_1d(dom, [](double x) { return std::sin(M_PI * x); });
  const GradientField gs = gradient(s);
  double worst = 0.0;
  for (int q = 1; q < 98; ++q) {
    const double x = dom.node_coord({q, 0})[0];
    worst = std::max(worst, std::abs(gs.at(q, 0, 0) - M_PI * std::cos(M_PI * x)));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("second differences: quadratics exact, smooth error bound") {
  const BoxDomain dom = unit_line(99);

  const SnapshotField quad = sample_1d(dom, [](double x) { return x * x; });
  const HessianField hq = hessian_field(quad);
  for (int q = 1; q < 98; ++q) CHECK(hq.at(q, 0, 0, 0) == doctest::Approx(2.0).epsilon(1e-10));

  const SnapshotField lin = sample_1d(dom, [](double x) { return 2.0 * x; });
  const HessianField hl = hessian_field(lin);
  for (int q = 1; q < 98; ++q) CHECK(hl.at(q, 0, 0, 0) == doctest::Approx(0.0).epsilon(1e-9));

  const SnapshotField s = sample_1d(dom, [](double x) { return std::sin(M_PI * x); });
  const HessianField hs = hessian_field(s);
  double worst = 0.0;
  for (int q = 1; q < 98; ++q) {
    const double x = dom.node_coord({q, 0})[0];
    worst = std::max(worst, std::abs(hs.at(q, 0, 0, 0) + M_PI * M_PI * std::sin(M_PI * x)));
  }
  CHECK(worst <= 8.2e-4);
}

TEST_CASE("2d stencils are exact on quadratics and symmetric") {
  const BoxDomain dom(2, {0.0, 0.0}, {1.0, 1.0}, {19, 19});
  SnapshotField f(dom, 1);
  for (int q = 0; q < dom.node_count(); ++q) {
    const auto x = dom.node_coord(dom.unflat(q));
    f.at(q, 0) = 0.5 * x[0] * x[0] + 2.0 * x[0] * x[1] - x[1] * x[1];
  }
  const GradientField g = gradient(f);
  const HessianField h = hessian_field(f);
  for (int a = 1; a < 18; ++a) {
    for (int b = 1; b < 18; ++b) {
      const int q = dom.flat({a, b});
      const auto x = dom.node_coord({a, b});
      CHECK(g.at(q, 0, 0) == doctest::Approx(x[0] + 2.0 * x[1]).epsilon(1e-10));
      CHECK(g.at(q, 0, 1) == doctest::Approx(2.0 * x[0] - 2.0 * x[1]).epsilon(1e-10));
      CHECK(h.at(q, 0, 0, 0) == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(h.at(q, 0, 0, 1) == doctest::Approx(2.0).epsilon(1e-8));
      CHECK(h.at(q, 0, 1, 1) == doctest::Approx(-2.0).epsilon(1e-8));
      CHECK(h.at(q, 0, 0, 1) == h.at(q, 0, 1, 0));
    }
  }
}

TEST_CASE("difference operators are linear") {
  const BoxDomain dom = unit_line(31);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  SnapshotField f(dom, 1), g(dom, 1);
  for (int q = 0; q < dom.node_count(); ++q) {
    f.at(q, 0) = unif(rng);
    g.at(q, 0) = unif(rng);
  }
  const double a = 2.5, b = -0.75;
  SnapshotField combo(dom, 1);
  for (int q = 0; q < dom.node_count(); ++q) combo.at(q, 0) = a * f.at(q, 0) + b * g.at(q, 0);

  const GradientField gf = gradient(f), gg = gradient(g), gcombo = gradient(combo);
  const HessianField hf = hessian_field(f), hg = hessian_field(g), hcombo = hessian_field(combo);
  for (int q = 0; q < dom.node_count(); ++q) {
    CHECK(gcombo.at(q, 0, 0) ==
          doctest::Approx(a * gf.at(q, 0, 0) + b * gg.at(q, 0, 0)).epsilon(1e-13));
    CHECK(hcombo.at(q, 0, 0, 0) ==
          doctest::Approx(a * hf.at(q, 0, 0, 0) + b * hg.at(q, 0, 0, 0)).epsilon(1e-13));
  }
}

TEST_CASE("backward time differences") {
  const BoxDomain dom = unit_line(9);
  SnapshotField w(dom, 1);
  for (int q = 0; q < 9; ++q) w.at(q, 0) = 0.5 + q * 0.1;

  Trajectory steady = scaled_profile_trajectory(dom, w, 4, 0.1, [](int, double) { return 1.0; });
  for (int k = 1; k <= 4; ++k) {
    const SnapshotField vt = time_derivative(steady, k);
    for (double v : vt.values) CHECK(v == doctest::Approx(0.0));
  }

  Trajectory ramp = scaled_profile_trajectory(dom, w, 4, 0.1,
                                              [](int k, double tau) { return k * tau; });
  const SnapshotField vt = time_derivative(ramp, 3);
  for (int q = 0; q < 9; ++q) CHECK(vt.at(q, 0) == doctest::Approx(w.at(q, 0)).epsilon(1e-13));

  CHECK_THROWS_AS(time_derivative(ramp, 0), config_error);
  CHECK_THROWS_AS(time_derivative(ramp, 5), config_error);
}

TEST_CASE("space quadrature: boundary-cell convention and smooth accuracy") {
  const BoxDomain dom = unit_line(99);
  const SnapshotField one = sample_1d(dom, [](double) { return 1.0; });
  CHECK(integrate_space(one, 0) == doctest::Approx(0.99).epsilon(1e-14));

  const SnapshotField s = sample_1d(dom, [](double x) { return std::sin(M_PI * x); });
  CHECK(integrate_space(s, 0) == doctest::Approx(2.0 / M_PI).epsilon(1e-4 * M_PI / 2.0));

  // additivity over a disjoint split of the node set
  std::vector<double> vals(dom.node_count());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double& v : vals) v = unif(rng);
  std::vector<double> left(vals), right(vals);
  for (int q = 0; q < dom.node_count(); ++q) (q < 50 ? right : left)[q] = 0.0;
  CHECK(integrate_space(dom, vals) ==
        doctest::Approx(integrate_space(dom, left) + integrate_space(dom, right))
            .epsilon(1e-13));
}

TEST_CASE("cylinder membership, admissibility, and averages") {
  const BoxDomain dom = unit_line(99);
  SnapshotField w(dom, 1);
  for (int q = 0; q < dom.node_count(); ++q) w.at(q, 0) = 2.5;
  Trajectory traj = scaled_profile_trajectory(dom, w, 100, 1e-3, [](int, double) { return 1.0; });
  traj.psi_spec = PotentialSpec{};
  traj.F_spec = PotentialSpec{};
  const TrajectoryAnalytics an(traj);

  ParabolicCylinder cyl{{0.5, 0.0}, 0.05, 0.2};
  const CylinderPoints pts = cylinder_points(traj, cyl);
  CHECK(pts.nodes.size() == 39);  // |x - 0.5| < 0.2 strictly
  CHECK(pts.steps.size() == 39);  // |k/1000 - 0.05| < 0.02 strictly

  // average of a constant trajectory is that constant at any admissible radius
  const auto avg = an.cylinder_average(CylinderQuantity::TimeDerivative, cyl);
  CHECK(avg[0] == doctest::Approx(0.0));
  ParabolicCylinder tiny{{0.5, 0.0}, 0.05, 0.0801};
  const auto avg_g = an.cylinder_average(CylinderQuantity::Gradient, tiny);
  CHECK(avg_g[0] == doctest::Approx(0.0).epsilon(1e-12));  // constant field, zero gradient

  // shrinking the radius below the resolution floor raises a geometry error
  ParabolicCylinder too_small{{0.5, 0.0}, 0.05, 0.05};
  CHECK_THROWS_AS(cylinder_points(traj, too_small), geometry_error);  // < 3 steps
  ParabolicCylinder outside{{0.05, 0.0}, 0.05, 0.2};
  CHECK_THROWS_AS(cylinder_points(traj, outside), geometry_error);
  ParabolicCylinder late{{0.5, 0.0}, 0.099, 0.2};
  CHECK_THROWS_AS(cylinder_points(traj, late), geometry_error);

  try {
    cylinder_points(traj, too_small);
  } catch (const geometry_error& e) {
    CHECK(e.axis() == "time");
  }
}

TEST_CASE("cylinder averages match a direct re-summation") {
  const BoxDomain dom = unit_line(49);
  SnapshotField profile(dom, 1);
  for (int q = 0; q < dom.node_count(); ++q) {
    profile.at(q, 0) = std::sin(M_PI * dom.node_coord(dom.unflat(q))[0]);
  }
  Trajectory traj = scaled_profile_trajectory(dom, profile, 50, 1e-3, [](int k, double tau) {
    return std::exp(-9.0 * k * tau);
  });
  const TrajectoryAnalytics an(traj);
  ParabolicCylinder cyl{{0.52, 0.0}, 0.025, 0.15};
  const CylinderPoints pts = cylinder_points(traj, cyl);

  const auto avg = an.cylinder_average(CylinderQuantity::Gradient, pts);
  double direct = 0.0;
  for (int k : pts.steps) {
    const GradientField& g = an.grad(k);
    for (int q : pts.nodes) direct += g.at(q, 0, 0);
  }
  direct /= static_cast<double>(pts.count());
  CHECK(avg[0] == doctest::Approx(direct).epsilon(1e-12));
}
