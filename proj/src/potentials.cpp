#include "dnf/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dnf {

void ConvexityBounds::validate() const {
  if (!(theta > 0.0) || !(Theta >= theta)) {
    throw config_error("convexity bounds require 0 < theta <= Theta");
  }
  if (!(lambda > 0.0) || !(Lambda >= lambda)) {
    throw config_error("convexity bounds require 0 < lambda <= Lambda");
  }
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw config_error("Hessian Hölder exponent must lie in (0, 1]");
  }
  if (holder_const < 0.0) {
    throw config_error("Hessian Hölder constant must be nonnegative");
  }
}

namespace {

// soft part s(v) = eps*(sqrt(1+|v|^2) - 1) on a flattened vector.
double soft_value(const Eigen::VectorXd& v, double eps) {
  return eps * (std::sqrt(1.0 + v.squaredNorm()) - 1.0);
}

Eigen::VectorXd soft_gradient(const Eigen::VectorXd& v, double eps) {
  return eps / std::sqrt(1.0 + v.squaredNorm()) * v;
}

Eigen::MatrixXd soft_hessian(const Eigen::VectorXd& v, double eps) {
  const double s = std::sqrt(1.0 + v.squaredNorm());
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(v.size(), v.size()) * (eps / s);
  h -= (eps / (s * s * s)) * v * v.transpose();
  return h;
}

std::vector<double> diag_or_default(const PotentialSpec& spec, int size) {
  if (spec.diag.empty()) return std::vector<double>(size, 1.0);
  if (static_cast<int>(spec.diag.size()) != size) {
    throw config_error("aniso-quadratic diagonal has " + std::to_string(spec.diag.size()) +
                       " entries, expected " + std::to_string(size));
  }
  for (double d : spec.diag) {
    if (!(d > 0.0)) throw config_error("aniso-quadratic diagonal entries must be positive");
  }
  return spec.diag;
}

ConvexityBounds family_bounds(const PotentialSpec& spec, const std::vector<double>& diag) {
  ConvexityBounds b;
  if (spec.family == "quadratic") {
    // identity Hessian
  } else if (spec.family == "soft-quadratic") {
    if (!(spec.epsilon > 0.0)) throw config_error("soft-quadratic requires epsilon > 0");
    b.theta = 1.0;
    b.Theta = 1.0 + spec.epsilon;
    b.lambda = 1.0;
    b.Lambda = 1.0 + spec.epsilon;
    b.alpha = 1.0;
    b.holder_const = 3.0 * spec.epsilon;  // crude Lipschitz bound on the soft Hessian
  } else if (spec.family == "aniso-quadratic") {
    const double lo = *std::min_element(diag.begin(), diag.end());
    const double hi = *std::max_element(diag.begin(), diag.end());
    b.theta = b.lambda = lo;
    b.Theta = b.Lambda = hi;
  } else {
    throw config_error("unknown potential family '" + spec.family + "'");
  }
  if (spec.has_bounds_override) b = spec.bounds_override;
  b.validate();
  return b;
}

}  // namespace

ScalarPotential make_scalar_potential(const PotentialSpec& spec, int m) {
  if (m < 1) throw config_error("scalar potential needs m >= 1");
  ScalarPotential p;
  p.m = m;
  if (spec.family == "quadratic") {
    p.value = [](const Eigen::VectorXd& w) { return 0.5 * w.squaredNorm(); };
    p.gradient = [](const Eigen::VectorXd& w) { return w; };
    p.hessian = [](const Eigen::VectorXd& w) {
      return Eigen::MatrixXd::Identity(w.size(), w.size()).eval();
    };
  } else if (spec.family == "soft-quadratic") {
    const double eps = spec.epsilon;
    p.value = [eps](const Eigen::VectorXd& w) { return 0.5 * w.squaredNorm() + soft_value(w, eps); };
    p.gradient = [eps](const Eigen::VectorXd& w) {
      return (w + soft_gradient(w, eps)).eval();
    };
    p.hessian = [eps](const Eigen::VectorXd& w) {
      return (Eigen::MatrixXd::Identity(w.size(), w.size()) + soft_hessian(w, eps)).eval();
    };
  } else if (spec.family == "aniso-quadratic") {
    const auto diag = diag_or_default(spec, m);
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(diag.data(), m);
    p.value = [a](const Eigen::VectorXd& w) { return 0.5 * w.dot(a.cwiseProduct(w)); };
    p.gradient = [a](const Eigen::VectorXd& w) { return a.cwiseProduct(w).eval(); };
    p.hessian = [a](const Eigen::VectorXd&) { return a.asDiagonal().toDenseMatrix(); };
    p.bounds = family_bounds(spec, diag);
    return p;
  } else {
    throw config_error("unknown potential family '" + spec.family + "'");
  }
  p.bounds = family_bounds(spec, {});
  return p;
}

MatrixPotential make_matrix_potential(const PotentialSpec& spec, int m, int n) {
  if (m < 1 || n < 1) throw config_error("matrix potential needs m, n >= 1");
  MatrixPotential p;
  p.m = m;
  p.n = n;
  const int mn = m * n;
  if (spec.family == "quadratic") {
    p.value = [](const Eigen::MatrixXd& M) { return 0.5 * M.squaredNorm(); };
    p.gradient = [](const Eigen::MatrixXd& M) { return M; };
    p.hessian = [mn](const Eigen::MatrixXd&) {
      return Eigen::MatrixXd::Identity(mn, mn).eval();
    };
  } else if (spec.family == "soft-quadratic") {
    const double eps = spec.epsilon;
    p.value = [eps](const Eigen::MatrixXd& M) {
      return 0.5 * M.squaredNorm() + eps * (std::sqrt(1.0 + M.squaredNorm()) - 1.0);
    };
    p.gradient = [eps](const Eigen::MatrixXd& M) {
      return (M * (1.0 + eps / std::sqrt(1.0 + M.squaredNorm()))).eval();
    };
    p.hessian = [eps, mn](const Eigen::MatrixXd& M) {
      Eigen::VectorXd v = M.reshaped();
      return (Eigen::MatrixXd::Identity(mn, mn) + soft_hessian(v, eps)).eval();
    };
  } else if (spec.family == "aniso-quadratic") {
    const auto diag = diag_or_default(spec, mn);
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(diag.data(), mn);
    p.value = [a](const Eigen::MatrixXd& M) {
      Eigen::VectorXd v = M.reshaped();
      return 0.5 * v.dot(a.cwiseProduct(v));
    };
    p.gradient = [a, m, n](const Eigen::MatrixXd& M) {
      Eigen::VectorXd v = M.reshaped();
      return a.cwiseProduct(v).reshaped(m, n).eval();
    };
    p.hessian = [a](const Eigen::MatrixXd&) { return a.asDiagonal().toDenseMatrix(); };
    p.bounds = family_bounds(spec, diag);
    return p;
  } else {
    throw config_error("unknown potential family '" + spec.family + "'");
  }
  p.bounds = family_bounds(spec, {});
  return p;
}

namespace {

// Damped Newton for Dpsi(w) = z with Armijo backtracking on the merit
// 0.5*|Dpsi(w)-z|^2. Uniform convexity makes the Newton direction a descent
// direction everywhere, so this converges from any start.
Eigen::VectorXd invert_gradient(const ScalarPotential& psi, const Eigen::VectorXd& z, double tol,
                                int max_iter) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(psi.m);
  double res = (psi.gradient(w) - z).norm();
  for (int it = 0; it < max_iter; ++it) {
    if (res <= tol) return w;
    const Eigen::VectorXd g = psi.gradient(w) - z;
    const Eigen::MatrixXd H = psi.hessian(w);
    const Eigen::VectorXd d = H.ldlt().solve(-g);
    double t = 1.0;
    const double merit0 = 0.5 * g.squaredNorm();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd trial = w + t * d;
      const double merit = 0.5 * (psi.gradient(trial) - z).squaredNorm();
      if (merit <= merit0 * (1.0 - 1e-4 * t)) {
        w = trial;
        res = std::sqrt(2.0 * merit);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      throw numeric_error("gradient inversion line search stalled", res);
    }
  }
  if (res <= tol) return w;
  throw numeric_error("gradient inversion did not converge", res);
}

}  // namespace

std::pair<ScalarPotential, Eigen::VectorXd> normalize_scalar(const ScalarPotential& psi) {
  Eigen::VectorXd a;
  try {
    a = invert_gradient(psi, Eigen::VectorXd::Zero(psi.m), 1e-11, 200);
  } catch (const numeric_error& e) {
    throw config_error(std::string("argmin search failed; declared convexity bounds look wrong: ") +
                       e.what());
  }
  const double va = psi.value(a);
  ScalarPotential out;
  out.m = psi.m;
  out.bounds = psi.bounds;
  auto value = psi.value;
  auto gradient = psi.gradient;
  auto hessian = psi.hessian;
  out.value = [value, a, va](const Eigen::VectorXd& w) { return value(w + a) - va; };
  out.gradient = [gradient, a](const Eigen::VectorXd& w) { return gradient(w + a); };
  out.hessian = [hessian, a](const Eigen::VectorXd& w) { return hessian(w + a); };
  return {out, a};
}

MatrixPotential normalize_matrix(const MatrixPotential& F) {
  const Eigen::MatrixXd O = Eigen::MatrixXd::Zero(F.m, F.n);
  const double f0 = F.value(O);
  const Eigen::MatrixXd g0 = F.gradient(O);
  MatrixPotential out;
  out.m = F.m;
  out.n = F.n;
  out.bounds = F.bounds;
  auto value = F.value;
  auto gradient = F.gradient;
  out.value = [value, f0, g0](const Eigen::MatrixXd& M) {
    return value(M) - f0 - (g0.array() * M.array()).sum();
  };
  out.gradient = [gradient, g0](const Eigen::MatrixXd& M) { return (gradient(M) - g0).eval(); };
  out.hessian = F.hessian;
  return out;
}

Eigen::VectorXd legendre_dual_grad(const ScalarPotential& psi, const Eigen::VectorXd& z,
                                   double tol) {
  if (!(tol > 0.0)) throw config_error("legendre_dual_grad needs tol > 0");
  return invert_gradient(psi, z, tol, 200);
}

double legendre_value(const ScalarPotential& psi, const Eigen::VectorXd& z, double tol) {
  const Eigen::VectorXd w = legendre_dual_grad(psi, z, tol);
  return z.dot(w) - psi.value(w);
}

double dual_energy_value(const ScalarPotential& psi, const Eigen::VectorXd& w) {
  return psi.gradient(w).dot(w) - psi.value(w);
}

namespace {

Eigen::VectorXd sample_in_ball(std::mt19937_64& rng, int dim, double radius) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  const double norm = v.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(dim);
  const double r = radius * std::pow(unif(rng), 1.0 / dim);
  return (r / norm) * v;
}

struct LineAccum {
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd lo_witness, hi_witness;
  void add(double ratio, const Eigen::VectorXd& at) {
    if (ratio < min_ratio) {
      min_ratio = ratio;
      lo_witness = at;
    }
    if (ratio > max_ratio) {
      max_ratio = ratio;
      hi_witness = at;
    }
  }
};

BoundLine finish_line(const std::string& name, const LineAccum& acc, double lower, double upper,
                      double slack) {
  BoundLine line;
  line.name = name;
  line.min_ratio = acc.min_ratio;
  line.max_ratio = acc.max_ratio;
  const bool lo_ok = acc.min_ratio >= lower - slack;
  const bool hi_ok = acc.max_ratio <= upper + slack;
  line.pass = lo_ok && hi_ok;
  line.witness = lo_ok ? acc.hi_witness : acc.lo_witness;
  return line;
}

// Shared certification core over the flattened representation; `dim` is m for
// the scalar potential and m*n for the matrix one.
BoundsReport verify_bounds_impl(int dim, double lower, double upper,
                                const std::function<double(const Eigen::VectorXd&)>& value,
                                const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                                const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& hess,
                                int sample_count, double radius, unsigned seed,
                                bool with_form_line) {
  if (sample_count < 2) throw config_error("verify_bounds needs sample_count >= 2");
  constexpr double kSlack = 1e-9;
  std::mt19937_64 rng(seed);

  LineAccum mono, eig, val, gap, pair, gnorm, form;
  for (int s = 0; s < sample_count; ++s) {
    const Eigen::VectorXd w1 = sample_in_ball(rng, dim, radius);
    const Eigen::VectorXd w2 = sample_in_ball(rng, dim, radius);
    const double dist2 = (w1 - w2).squaredNorm();
    if (dist2 > 1e-24) {
      const double ratio = (grad(w1) - grad(w2)).dot(w1 - w2) / dist2;
      Eigen::VectorXd at(2 * dim);
      at << w1, w2;
      mono.add(ratio, at);
    }

    const Eigen::MatrixXd H = hess(w1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    eig.add(es.eigenvalues().minCoeff(), w1);
    eig.add(es.eigenvalues().maxCoeff(), w1);

    const double nw2 = w1.squaredNorm();
    if (nw2 > 1e-24) {
      const Eigen::VectorXd g = grad(w1);
      val.add(value(w1) / (0.5 * nw2), w1);
      gap.add((g.dot(w1) - value(w1)) / (0.5 * nw2), w1);
      pair.add(g.dot(w1) / nw2, w1);
      gnorm.add(g.norm() / std::sqrt(nw2), w1);
    }

    if (with_form_line) {
      const Eigen::VectorXd xi = sample_in_ball(rng, dim, 1.0);
      const double nxi2 = xi.squaredNorm();
      if (nxi2 > 1e-24) {
        form.add(xi.dot(H * xi) / nxi2, w1);
      }
    }
  }

  BoundsReport rep;
  rep.lines.push_back(finish_line("gradient monotonicity", mono, lower, upper, kSlack));
  rep.lines.push_back(finish_line("hessian eigenvalues", eig, lower, upper, kSlack));
  rep.lines.push_back(finish_line("value growth", val, lower, upper, kSlack));
  rep.lines.push_back(finish_line("duality gap growth", gap, lower, upper, kSlack));
  rep.lines.push_back(finish_line("gradient pairing", pair, lower, upper, kSlack));
  rep.lines.push_back(finish_line("gradient norm", gnorm, lower, upper, kSlack));
  if (with_form_line) {
    rep.lines.push_back(finish_line("hessian form", form, lower, upper, kSlack));
  }
  for (const auto& line : rep.lines) rep.pass = rep.pass && line.pass;
  return rep;
}

}  // namespace

std::string BoundsReport::summary() const {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL");
  for (const auto& line : lines) {
    if (!line.pass) {
      os << "; violated: " << line.name << " [" << line.min_ratio << ", " << line.max_ratio
         << "] at (";
      for (int i = 0; i < line.witness.size(); ++i) {
        if (i) os << ", ";
        os << line.witness[i];
      }
      os << ")";
    }
  }
  return os.str();
}

BoundsReport verify_bounds(const ScalarPotential& psi, int sample_count, double radius,
                           unsigned seed) {
  psi.bounds.validate();
  auto value = psi.value;
  auto grad = psi.gradient;
  auto hess = psi.hessian;
  return verify_bounds_impl(psi.m, psi.bounds.theta, psi.bounds.Theta, value, grad, hess,
                            sample_count, radius, seed, /*with_form_line=*/false);
}

BoundsReport verify_bounds(const MatrixPotential& F, int sample_count, double radius,
                           unsigned seed) {
  F.bounds.validate();
  const int m = F.m, n = F.n;
  auto value = [m, n, &F](const Eigen::VectorXd& v) { return F.value(v.reshaped(m, n)); };
  auto grad = [m, n, &F](const Eigen::VectorXd& v) {
    return F.gradient(v.reshaped(m, n)).reshaped().eval();
  };
  auto hess = [m, n, &F](const Eigen::VectorXd& v) { return F.hessian(v.reshaped(m, n)); };
  return verify_bounds_impl(m * n, F.bounds.lambda, F.bounds.Lambda, value, grad, hess,
                            sample_count, radius, seed, /*with_form_line=*/true);
}

double effective_alpha(double alpha, double p) {
  if (!(alpha > 0.0) || !(alpha <= 1.0)) throw config_error("effective_alpha needs alpha in (0,1]");
  if (!(p > 2.0)) throw config_error("effective_alpha needs p > 2");
  return std::min(alpha, 2.0 * (p - 2.0) / p);
}

std::pair<double, double> hessian_holder_estimate(const MatrixPotential& F, int sample_count,
                                                  unsigned seed) {
  if (sample_count < 10) throw config_error("hessian_holder_estimate needs sample_count >= 10");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int mn = F.m * F.n;

  // Separations spread log-uniformly over several decades so the slope fit is
  // well conditioned.
  std::vector<double> xs, ys;
  xs.reserve(sample_count);
  ys.reserve(sample_count);
  for (int s = 0; s < sample_count; ++s) {
    const Eigen::VectorXd base = sample_in_ball(rng, mn, 2.0);
    Eigen::VectorXd dir = sample_in_ball(rng, mn, 1.0);
    if (dir.norm() < 1e-12) continue;
    dir.normalize();
    const double sep = std::pow(10.0, -4.0 + 4.0 * unif(rng));
    const Eigen::MatrixXd M1 = base.reshaped(F.m, F.n);
    const Eigen::MatrixXd M2 = (base + sep * dir).reshaped(F.m, F.n);
    const double diff = (F.hessian(M1) - F.hessian(M2)).norm();
    if (diff < 1e-14) continue;  // constant-Hessian region contributes nothing
    xs.push_back(std::log(sep));
    ys.push_back(std::log(diff));
  }

  if (xs.empty()) {
    // Constant Hessian: all sampled differences vanish.
    return {1.0, 0.0};
  }
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx < 1e-12) throw numeric_error("degenerate sample spread in Hölder fit", sxx);
  const double slope = sxy / sxx;
  const double alpha_hat = std::clamp(slope, 1e-12, 1.0);
  const double const_hat = std::exp(my - slope * mx);
  return {alpha_hat, const_hat};
}

}  // namespace dnf
