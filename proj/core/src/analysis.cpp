#include "isotrack/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace isotrack {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
}

bool positive_definite(const Eigen::Matrix3d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace

// ---------- equilibrium ----------

EquilibriumReport solve_equilibrium(const Gains& g, double alpha, double r_d, double v,
                                    double s_d) {
  require_positive(g.c1, "c1");
  require_positive(g.c3, "c3");
  require_positive(g.c4, "c4");
  require_positive(alpha, "alpha");
  require_positive(r_d, "r_d");
  require_positive(v, "v");

  const auto gfun = [&](double r) {
    return -std::tanh(alpha * (r - r_d) / g.c4) + v / (g.c1 * g.c3 * r);
  };

  // g decreases strictly in r; bracket the root by doubling outward from r_d.
  double lo = 1e-9;
  double hi = r_d;
  while (gfun(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e9 * r_d) throw std::runtime_error("equilibrium bracketing failed: no sign change");
  }
  int iterations = 0;
  while (hi - lo > 1e-12 && iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    (gfun(mid) > 0.0 ? lo : hi) = mid;
    ++iterations;
  }
  const double r_e = 0.5 * (lo + hi);
  return {r_e, s_d - alpha * (r_e - r_d), std::abs(gfun(r_e)), iterations};
}

// ---------- gain conditions ----------

bool check_p_conditions(const Gains& g, double alpha, double v) {
  return g.c1 > 0.0 && alpha * v > g.c3 && g.c3 > 0.0 && g.c4 > 0.0;
}

bool check_pi_conditions(const Gains& g, double alpha, double v) {
  return g.c1 * (g.c1 - 2.0) * v * alpha > g.c2 && g.c2 >= 0.0 && alpha * v > g.c3 &&
         g.c3 > 0.0 && g.c4 > 0.0;
}

// ---------- linearized PI loop ----------

Eigen::Matrix3d jacobian_pi(const Gains& g, double alpha, double r_d, double v) {
  require_positive(alpha, "alpha");
  require_positive(r_d, "r_d");
  require_positive(v, "v");
  require_positive(g.c4, "c4");
  const double omega_c = -v / r_d;
  const double mu1 = g.c1 * g.c3 * alpha / g.c4 + omega_c / r_d;
  Eigen::Matrix3d a;
  a << 0.0, v, 0.0,  //
      -mu1, -g.c1 * v * alpha, g.c2,  //
      -g.c3 * alpha / g.c4, -v * alpha, 0.0;
  return a;
}

LyapunovReport lyapunov_matrices(const Gains& g, double alpha, double r_d, double v) {
  const double omega_c = -v / r_d;
  const double c1 = g.c1, c2 = g.c2, c3 = g.c3, c4 = g.c4;
  LyapunovReport rep;
  rep.mu1 = c1 * c3 * alpha / c4 + omega_c / r_d;
  rep.mu2 = c1 * alpha * (c1 * alpha * v * rep.mu1 - c2 * c3 * alpha / (2.0 * c4));
  rep.mu3 = rep.mu1 * v / 2.0 + c2 * alpha * v / 2.0;
  rep.mu4 = c1 * c2 * c4 * v * rep.mu1 / c3 - c2 * c2 / 2.0;

  const double m1 = rep.mu1;
  Eigen::Matrix3d p;
  p << 2.0 * rep.mu2 + m1 * m1, c1 * alpha * v * m1, -c2 * m1,  //
      c1 * alpha * v * m1, 2.0 * rep.mu3 + (c1 * alpha * v) * (c1 * alpha * v),
      -c1 * c2 * alpha * v,  //
      -c2 * m1, -c1 * c2 * alpha * v, 2.0 * rep.mu4 + c2 * c2;
  rep.P = 0.5 * p;

  Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
  q(0, 0) = c1 * alpha * v * m1 * m1 - c2 * c3 * alpha * m1 / c4;
  q(1, 1) = std::pow(c1 * alpha * v, 3);
  q(1, 2) = q(2, 1) = c2 * (c1 * alpha * v) * (c1 * alpha * v) - c2 * c2 * alpha * v / 2.0 +
                      c1 * c2 * c4 * (alpha * v) * (alpha * v) * m1 / (c3 * alpha);
  q(2, 2) = c1 * c2 * c2 * alpha * v;
  rep.Q = q;

  rep.p_positive_definite = positive_definite(rep.P);
  rep.q_positive_definite = positive_definite(rep.Q);
  const Eigen::Matrix3d a = jacobian_pi(g, alpha, r_d, v);
  rep.residual = (a.transpose() * rep.P + rep.P * a + rep.Q).norm();
  return rep;
}

std::array<std::complex<double>, 3> eigenvalues(const Eigen::Matrix3d& m) {
  Eigen::EigenSolver<Eigen::Matrix3d> es(m);
  std::array<std::complex<double>, 3> out;
  for (int i = 0; i < 3; ++i) out[i] = es.eigenvalues()(i);
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

std::array<std::complex<double>, 2> eigenvalues(const Eigen::Matrix2d& m) {
  // Closed form from trace and determinant.
  const double tr = m.trace();
  const double det = m.determinant();
  const double disc = tr * tr / 4.0 - det;
  std::array<std::complex<double>, 2> out;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    out = {std::complex<double>(tr / 2.0 - root, 0.0), std::complex<double>(tr / 2.0 + root, 0.0)};
  } else {
    const double root = std::sqrt(-disc);
    out = {std::complex<double>(tr / 2.0, -root), std::complex<double>(tr / 2.0, root)};
  }
  return out;
}

StabilityReport stability_report(const Gains& g, double alpha, double r_d, double v) {
  StabilityReport rep;
  rep.p_conditions = check_p_conditions(g, alpha, v);
  rep.pi_conditions = check_pi_conditions(g, alpha, v);
  rep.omega_c = -v / r_d;
  rep.A = jacobian_pi(g, alpha, r_d, v);
  rep.eigen_a = eigenvalues(rep.A);
  rep.max_real = std::max({rep.eigen_a[0].real(), rep.eigen_a[1].real(), rep.eigen_a[2].real()});
  rep.lyapunov = lyapunov_matrices(g, alpha, r_d, v);
  return rep;
}

// ---------- proportional-only local rate ----------

RateReport p_linearization(const Gains& g, double alpha, double r_d, double v, double s_d) {
  RateReport rep;
  rep.equilibrium = solve_equilibrium(g, alpha, r_d, v, s_d);
  const double s_e = rep.equilibrium.s_e;
  const double th = std::tanh((s_e - s_d) / g.c4);
  const double denom = alpha * r_d + s_d - s_e;  // equals alpha * r_e
  rep.a21 = (g.c1 * g.c3 / g.c4) * (1.0 - th * th) - alpha * v / (denom * denom);
  rep.A << 0.0, -alpha * v, rep.a21, -g.c1 * alpha * v;
  rep.delta = (g.c1 * alpha * v) * (g.c1 * alpha * v) - 4.0 * rep.a21 * alpha * v;
  rep.rho = rep.delta > 0.0 ? (g.c1 * alpha * v - std::sqrt(rep.delta)) / 2.0
                            : g.c1 * alpha * v / 2.0;
  rep.eigen_a = eigenvalues(Eigen::Matrix2d(rep.A));

  // cond2 of the eigenvector matrix with unit-norm columns. Eigenvectors of
  // [[0, -alpha v], [a21, -c1 alpha v]] are (-alpha v, lambda); with unit
  // columns G^H G = [[1, c], [conj(c), 1]], so cond2 = sqrt((1+|c|)/(1-|c|)).
  const std::complex<double> av(-alpha * v, 0.0);
  const std::complex<double> l1 = rep.eigen_a[0], l2 = rep.eigen_a[1];
  const double n1 = std::sqrt(std::norm(av) + std::norm(l1));
  const double n2 = std::sqrt(std::norm(av) + std::norm(l2));
  const double c = std::abs(av * std::conj(av) + l1 * std::conj(l2)) / (n1 * n2);
  rep.eigvec_condition = c < 1.0 ? std::sqrt((1.0 + c) / (1.0 - c))
                                 : std::numeric_limits<double>::infinity();
  return rep;
}

// ---------- steady-state error bound ----------

ErrorBoundReport steady_error_bound(const Gains& g, const FieldBounds& b, double v,
                                    double eps_margin) {
  require_positive(g.c1, "c1");
  require_positive(g.c3, "c3");
  require_positive(g.c4, "c4");
  require_positive(v, "v");
  require_positive(b.gamma1, "gamma1");
  if (!(eps_margin > 0.0 && eps_margin < kPi / 2.0)) {
    throw std::invalid_argument("eps_margin must lie in (0, pi/2)");
  }
  ErrorBoundReport rep;
  const double sin_m = std::sin(eps_margin);
  const double cos_m = std::cos(eps_margin);
  rep.c3_ok = g.c3 < v * b.gamma1 * cos_m;
  const double region_denom = b.gamma1 * sin_m * (v * b.gamma1 * cos_m - g.c3);
  rep.c1_min_region = region_denom > 0.0 ? b.gamma3 * v / region_denom
                                         : std::numeric_limits<double>::infinity();
  rep.c1_min_bound = (g.c4 * b.gamma3 * v + g.c3 * b.gamma2) / (g.c3 * b.gamma1 * sin_m);
  rep.atanh_argument =
      (g.c4 * b.gamma3 * v + g.c3 * b.gamma2) / (g.c1 * g.c3 * b.gamma1 * sin_m);
  if (rep.atanh_argument >= 1.0) {
    throw std::domain_error("steady-error bound vacuous: atanh argument >= 1");
  }
  rep.bound = std::atanh(rep.atanh_argument);
  return rep;
}

// ---------- scalar helper lemmas ----------

double tanh_ode_bound(double k, double b) {
  if (!(k > 0.0) || b < 0.0 || !(k > b)) {
    throw std::invalid_argument("tanh_ode_bound requires k > b >= 0");
  }
  return std::atanh(b / k);
}

double speed_convergence_time(double v2_initial, double v, double c5) {
  require_positive(c5, "c5");
  if (!(v2_initial >= 0.0) || !(v >= 0.0)) {
    throw std::invalid_argument("speeds must be non-negative");
  }
  return std::abs(v2_initial - v) / c5;
}

}  // namespace isotrack
