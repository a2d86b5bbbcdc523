#include <doctest.h>

#include <cmath>
#include <random>

#include "dnf/potentials.hpp"

using namespace dnf;

namespace {

PotentialSpec soft_spec(double eps) {
  PotentialSpec s;
  s.family = "soft-quadratic";
  s.epsilon = eps;
  return s;
}

// off-origin scalar potential psi(w) = soft(w - a0) + c, argmin at a0
ScalarPotential shifted_soft(int m, const Eigen::VectorXd& a0, double c) {
  ScalarPotential base = make_scalar_potential(soft_spec(0.5), m);
  ScalarPotential out = base;
  out.value = [base, a0, c](const Eigen::VectorXd& w) { return base.value(w - a0) + c; };
  out.gradient = [base, a0](const Eigen::VectorXd& w) { return base.gradient(w - a0); };
  out.hessian = [base, a0](const Eigen::VectorXd& w) { return base.hessian(w - a0); };
  return out;
}

}  // namespace

TEST_CASE("bounds validation rejects bad windows") {
  ConvexityBounds b;
  b.theta = 0.0;
  CHECK_THROWS_AS(b.validate(), config_error);
  b = ConvexityBounds{};
  b.Theta = 0.5;  // below theta
  CHECK_THROWS_AS(b.validate(), config_error);
  b = ConvexityBounds{};
  b.alpha = 1.5;
  CHECK_THROWS_AS(b.validate(), config_error);
}

TEST_CASE("normalization: quadratic is already centered") {
  const ScalarPotential psi = make_scalar_potential(PotentialSpec{}, 1);
  const auto [tilde, shift] = normalize_scalar(psi);
  CHECK(shift.norm() == doctest::Approx(0.0).epsilon(1e-12));
  Eigen::VectorXd w(1);
  w << 0.7;
  CHECK(tilde.value(w) == doctest::Approx(psi.value(w)).epsilon(1e-14));
}

TEST_CASE("normalization: completing the square") {
  // psi(w) = 0.5 (w - 1)^2 has argmin 1 and normalizes to 0.5 w^2
  ScalarPotential psi = make_scalar_potential(PotentialSpec{}, 1);
  psi.value = [](const Eigen::VectorXd& w) { return 0.5 * (w[0] - 1.0) * (w[0] - 1.0); };
  psi.gradient = [](const Eigen::VectorXd& w) {
    Eigen::VectorXd g(1);
    g << w[0] - 1.0;
    return g;
  };
  psi.hessian = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(1, 1).eval(); };
  const auto [tilde, shift] = normalize_scalar(psi);
  CHECK(shift[0] == doctest::Approx(1.0).epsilon(1e-10));
  Eigen::VectorXd w(1);
  w << 0.3;
  CHECK(tilde.value(w) == doctest::Approx(0.5 * 0.3 * 0.3).epsilon(1e-10));
  CHECK(tilde.gradient(Eigen::VectorXd::Zero(1)).norm() <= 1e-10);
}

TEST_CASE("normalization: soft-quadratic fixed point and shifted argmin") {
  const ScalarPotential soft = make_scalar_potential(soft_spec(0.5), 2);
  const auto [tilde, shift] = normalize_scalar(soft);
  CHECK(shift.norm() <= 1e-10);

  Eigen::VectorXd a0(2);
  a0 << 0.4, -0.9;
  const ScalarPotential off = shifted_soft(2, a0, 0.37);
  const auto [tilde2, shift2] = normalize_scalar(off);
  CHECK((shift2 - a0).norm() <= 1e-9);
  CHECK(std::abs(tilde2.value(Eigen::VectorXd::Zero(2))) <= 1e-12);
  CHECK(tilde2.gradient(Eigen::VectorXd::Zero(2)).norm() <= 1e-10);

  // idempotence
  const auto [tilde3, shift3] = normalize_scalar(tilde2);
  CHECK(shift3.norm() <= 1e-12);
  Eigen::VectorXd w(2);
  w << 1.1, 0.2;
  CHECK(tilde3.value(w) == doctest::Approx(tilde2.value(w)).epsilon(1e-12));
}

TEST_CASE("matrix normalization subtracts the affine part") {
  // F(M) = 0.5 |M - A|^2 normalizes to 0.5 |M|^2
  Eigen::MatrixXd A(1, 2);
  A << 0.3, -0.7;
  MatrixPotential F = make_matrix_potential(PotentialSpec{}, 1, 2);
  F.value = [A](const Eigen::MatrixXd& M) { return 0.5 * (M - A).squaredNorm(); };
  F.gradient = [A](const Eigen::MatrixXd& M) { return (M - A).eval(); };
  const MatrixPotential tilde = normalize_matrix(F);
  CHECK(std::abs(tilde.value(Eigen::MatrixXd::Zero(1, 2))) <= 1e-14);
  CHECK(tilde.gradient(Eigen::MatrixXd::Zero(1, 2)).norm() <= 1e-12);
  Eigen::MatrixXd M(1, 2);
  M << 1.5, 0.25;
  CHECK(tilde.value(M) == doctest::Approx(0.5 * M.squaredNorm()).epsilon(1e-13));
  CHECK((tilde.hessian(M) - F.hessian(M)).norm() <= 1e-14);

  // soft-quadratic is already normalized
  const MatrixPotential soft = make_matrix_potential(soft_spec(0.5), 1, 2);
  const MatrixPotential soft_tilde = normalize_matrix(soft);
  CHECK(soft_tilde.value(M) == doctest::Approx(soft.value(M)).epsilon(1e-14));
}

TEST_CASE("conjugate gradient map inverts the gradient") {
  const ScalarPotential quad = make_scalar_potential(PotentialSpec{}, 2);
  Eigen::VectorXd z(2);
  z << 0.3, -2.0;
  CHECK((legendre_dual_grad(quad, z) - z).norm() <= 1e-12);

  const ScalarPotential soft = make_scalar_potential(soft_spec(0.5), 1);
  Eigen::VectorXd z1(1);
  z1 << 1.3535533906;
  const Eigen::VectorXd w = legendre_dual_grad(soft, z1, 1e-11);
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(legendre_dual_grad(soft, Eigen::VectorXd::Zero(1)).norm() <= 1e-11);
}

TEST_CASE("conjugate values") {
  const ScalarPotential quad = make_scalar_potential(PotentialSpec{}, 2);
  Eigen::VectorXd z(2);
  z << 1.25, -0.5;
  CHECK(legendre_value(quad, z) == doctest::Approx(0.5 * z.squaredNorm()).epsilon(1e-12));
  CHECK(legendre_value(quad, Eigen::VectorXd::Zero(2)) == doctest::Approx(0.0));

  const ScalarPotential soft = make_scalar_potential(soft_spec(0.5), 1);
  Eigen::VectorXd z1(1);
  z1 << 1.3535533906;
  CHECK(legendre_value(soft, z1) == doctest::Approx(0.6464466094).epsilon(1e-8));
}

TEST_CASE("conjugate round trip and duality identity on seeded points") {
  const ScalarPotential soft = make_scalar_potential(soft_spec(0.5), 2);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd w(2);
    w << 10.0 * unif(rng), 10.0 * unif(rng);
    const Eigen::VectorXd z = soft.gradient(w);
    CHECK((legendre_dual_grad(soft, z, 1e-12) - w).norm() <= 1e-8);
    const double gap = soft.value(w) + legendre_value(soft, z, 1e-12) - z.dot(w);
    CHECK(std::abs(gap) <= 1e-8);
    // the dual-energy shortcut agrees with the inverted conjugate
    CHECK(dual_energy_value(soft, w) ==
          doctest::Approx(legendre_value(soft, z, 1e-12)).epsilon(1e-8));
  }
}

TEST_CASE("growth chain for normalized potentials") {
  const ScalarPotential soft = make_scalar_potential(soft_spec(0.5), 2);
  const double theta = soft.bounds.theta;
  const double Theta = soft.bounds.Theta;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int i = 0; i < 300; ++i) {
    Eigen::VectorXd w(2);
    w << unif(rng), unif(rng);
    const double n2 = w.squaredNorm();
    if (n2 < 1e-12) continue;
    const Eigen::VectorXd g = soft.gradient(w);
    CHECK(soft.value(w) >= 0.5 * theta * n2 - 1e-12);
    CHECK(soft.value(w) <= 0.5 * Theta * n2 + 1e-12);
    CHECK(g.dot(w) - soft.value(w) >= 0.5 * theta * n2 - 1e-12);
    CHECK(g.dot(w) - soft.value(w) <= 0.5 * Theta * n2 + 1e-12);
    CHECK(g.dot(w) >= theta * n2 - 1e-12);
    CHECK(g.dot(w) <= Theta * n2 + 1e-12);
    CHECK(g.norm() >= theta * std::sqrt(n2) - 1e-12);
    CHECK(g.norm() <= Theta * std::sqrt(n2) + 1e-12);
  }
}

TEST_CASE("certification passes honest bounds and catches planted ones") {
  const ScalarPotential quad = make_scalar_potential(PotentialSpec{}, 2);
  const BoundsReport r1 = verify_bounds(quad, 200, 4.0, 11);
  CHECK(r1.pass);
  for (const auto& line : r1.lines) {
    CHECK(line.min_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(line.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
  }

  CHECK(verify_bounds(make_scalar_potential(soft_spec(0.5), 2), 200, 4.0, 11).pass);
  PotentialSpec aniso;
  aniso.family = "aniso-quadratic";
  aniso.diag = {0.5, 2.0};
  CHECK(verify_bounds(make_scalar_potential(aniso, 2), 200, 4.0, 11).pass);
  CHECK(verify_bounds(make_matrix_potential(soft_spec(0.5), 2, 2), 200, 4.0, 11).pass);

  PotentialSpec planted;
  planted.has_bounds_override = true;
  planted.bounds_override.theta = 1.1;
  planted.bounds_override.Theta = 1.1;
  const BoundsReport bad = verify_bounds(make_scalar_potential(planted, 2), 200, 4.0, 11);
  CHECK_FALSE(bad.pass);
  bool named = false;
  for (const auto& line : bad.lines) {
    if (!line.pass) {
      named = true;
      CHECK(line.witness.size() > 0);
    }
  }
  CHECK(named);
  CHECK(bad.summary().find("violated") != std::string::npos);

  CHECK_THROWS_AS(verify_bounds(quad, 1, 4.0, 11), config_error);
}

TEST_CASE("largest admissible Hölder exponent") {
  CHECK(effective_alpha(1.0, 4.0) == doctest::Approx(1.0));
  CHECK(effective_alpha(1.0, 3.0) == doctest::Approx(2.0 / 3.0));
  CHECK(effective_alpha(0.2, 4.0) == doctest::Approx(0.2));
  CHECK_THROWS_AS(effective_alpha(0.0, 4.0), config_error);
  CHECK_THROWS_AS(effective_alpha(0.5, 2.0), config_error);
}

TEST_CASE("Hessian Hölder fit") {
  const MatrixPotential quad = make_matrix_potential(PotentialSpec{}, 1, 2);
  const auto [a_quad, c_quad] = hessian_holder_estimate(quad, 200, 3);
  CHECK(a_quad == doctest::Approx(1.0));
  CHECK(c_quad == doctest::Approx(0.0));

  const MatrixPotential soft = make_matrix_potential(soft_spec(0.5), 1, 2);
  const auto [a_soft, c_soft] = hessian_holder_estimate(soft, 5000, 3);
  CHECK(a_soft >= soft.bounds.alpha - 0.05);  // declared alpha = 1
  CHECK(c_soft > 0.0);

  CHECK_THROWS_AS(hessian_holder_estimate(soft, 5, 3), config_error);
}
