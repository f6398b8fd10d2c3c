#pragma once

// Numerical analysis of the closed loop on a radial field with linear slope
// alpha: equilibrium location, gain-condition checks, linearized stability
// (eigenvalues, candidate Lyapunov pair), local convergence rate, and the
// steady-state error bound for non-radial fields.
//
// For the exponential field the same machinery applies with the effective
// slope alpha = decay * s_d (the gradient magnitude on the target isoline)
// and r_d = ln(intensity / s_d) / decay.

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "isotrack/controllers.hpp"
#include "isotrack/fields.hpp"

namespace isotrack {

// ---------- equilibrium ----------

// Root of g(r) = -tanh(alpha*(r - r_d)/c4) + v / (c1*c3*r): the radius at
// which the proportional-only loop settles, always beyond r_d, with
// s_e = s_d - alpha*(r_e - r_d) the concentration actually held.
struct EquilibriumReport {
  double r_e = 0.0;
  double s_e = 0.0;
  double residual = 0.0;  // |g(r_e)|
  int iterations = 0;
};

EquilibriumReport solve_equilibrium(const Gains& g, double alpha, double r_d, double v,
                                    double s_d);

// ---------- gain conditions ----------

// Proportional-only loop: c1 > 0, alpha*v > c3 > 0, c4 > 0.
bool check_p_conditions(const Gains& g, double alpha, double v);

// PI loop: c1*(c1 - 2)*v*alpha > c2 >= 0 in addition to alpha*v > c3 > 0,
// c4 > 0 (evaluated as printed raw inequalities).
bool check_pi_conditions(const Gains& g, double alpha, double v);

// ---------- linearized PI loop ----------

// Closed-loop Jacobian of the PI loop about the orbit equilibrium,
// assembled row-for-row as
//   [ 0        v          0  ]
//   [ -mu1    -c1*v*alpha c2 ]
//   [ -c3*alpha/c4  -v*alpha 0 ]
// with mu1 = c1*c3*alpha/c4 + omega_c/r_d and omega_c = -v/r_d.
Eigen::Matrix3d jacobian_pi(const Gains& g, double alpha, double r_d, double v);

// Candidate Lyapunov pair for the PI loop, assembled from the published
// closed forms. The pair does not in general satisfy A'P + PA + Q = 0 and Q
// is not positive definite in the sampled gain ranges; both facts are
// surfaced as data (definiteness flags and the residual norm) rather than
// asserted away.
struct LyapunovReport {
  Eigen::Matrix3d P;
  Eigen::Matrix3d Q;
  double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0, mu4 = 0.0;
  bool p_positive_definite = false;
  bool q_positive_definite = false;
  double residual = 0.0;  // Frobenius norm of A'P + PA + Q
};

LyapunovReport lyapunov_matrices(const Gains& g, double alpha, double r_d, double v);

// Eigenvalues sorted by (real, imag) ascending.
std::array<std::complex<double>, 3> eigenvalues(const Eigen::Matrix3d& m);
std::array<std::complex<double>, 2> eigenvalues(const Eigen::Matrix2d& m);

// Combined stability summary used by reporting.
struct StabilityReport {
  bool p_conditions = false;
  bool pi_conditions = false;
  double omega_c = 0.0;
  Eigen::Matrix3d A;
  std::array<std::complex<double>, 3> eigen_a;
  double max_real = 0.0;
  LyapunovReport lyapunov;
};

StabilityReport stability_report(const Gains& g, double alpha, double r_d, double v);

// ---------- proportional-only local rate ----------

// Linearization of the proportional-only (s, phi) loop about its
// equilibrium:
//   A = [ 0      -alpha*v ]
//       [ a21   -c1*alpha*v ]
//   a21 = (c1*c3/c4)*(1 - tanh((s_e - s_d)/c4)^2) - alpha*v/(alpha*r_d + s_d - s_e)^2
// rho is the slow decay rate: the smaller |Re| of the eigenvalues
// ((c1*alpha*v - sqrt(delta))/2 when delta > 0, c1*alpha*v/2 otherwise).
// eigvec_condition is cond2 of the unit-column eigenvector matrix.
struct RateReport {
  EquilibriumReport equilibrium;
  Eigen::Matrix2d A;
  double a21 = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  std::array<std::complex<double>, 2> eigen_a;
  double eigvec_condition = 0.0;
};

RateReport p_linearization(const Gains& g, double alpha, double r_d, double v, double s_d);

// ---------- steady-state error bound on a bounded-slope field ----------

// Ultimate bound on |eps| when gamma1 <= |grad F| <= gamma2,
// |hess F| <= gamma3 over the visited region and the heading error keeps a
// margin eps_margin away from the region boundary {0, -pi}:
//   bound = atanh( (c4*gamma3*v + c3*gamma2) / (c1*c3*gamma1*sin(eps_margin)) )
// Throws std::domain_error when the atanh argument reaches 1 (vacuous bound).
struct ErrorBoundReport {
  double bound = 0.0;
  double atanh_argument = 0.0;
  double c1_min_region = 0.0;  // smallest c1 keeping the region invariant
  double c1_min_bound = 0.0;   // smallest c1 making the bound non-vacuous
  bool c3_ok = false;          // c3 < v*gamma1*cos(eps_margin)
};

ErrorBoundReport steady_error_bound(const Gains& g, const FieldBounds& b, double v,
                                    double eps_margin);

// ---------- scalar helper lemmas ----------

// Ultimate bound of z' = -k*tanh(z) + b with k > b >= 0: atanh(b/k).
double tanh_ode_bound(double k, double b);

// Time for the speed regulator to pull |v2| from v2_initial to v at slew c5.
double speed_convergence_time(double v2_initial, double v, double c5);

}  // namespace isotrack
