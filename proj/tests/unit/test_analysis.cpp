#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "isotrack/analysis.hpp"

using namespace isotrack;

// Reference constants in this file were derived with 50-digit arithmetic
// from the closed-form definitions (root solving, matrix assembly,
// eigen-decomposition), independently of the implementations under test.

namespace {

// The exponential-field benchmark: intensity 30, decay 0.1, target s_d = 20,
// speed 0.5. The isoline radius is 10*ln(1.5); on the target isoline the
// gradient magnitude ("effective slope") is decay * s_d = 2.
constexpr double kRd = 4.0546510810816438;
constexpr double kV = 0.5;
constexpr double kSd = 20.0;
constexpr double kAlphaEff = 2.0;

Gains table1() {
  Gains g;
  g.c1 = 10.0;
  g.c2 = 1.0;
  g.c3 = 0.3;
  g.c4 = 1.0;
  return g;
}

Gains table1_p() {
  Gains g = table1();
  g.c2 = 0.0;
  return g;
}

// Independent cubic eigenvalue oracle: trigonometric solution of the
// characteristic polynomial (three-real-root case).
std::array<double, 3> cubic_roots(double a2, double a1, double a0) {
  const double p = a1 - a2 * a2 / 3.0;
  const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  std::array<double, 3> t{m * std::cos(theta), m * std::cos(theta - 2.0 * kPi / 3.0),
                          m * std::cos(theta - 4.0 * kPi / 3.0)};
  for (double& r : t) r -= a2 / 3.0;
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace

TEST_CASE("equilibrium radius on the raw-slope view") {
  // Treating the raw decay 0.1 as the slope: the root sits well beyond the
  // isoline radius because the shallow slope needs a large offset.
  const EquilibriumReport eq = solve_equilibrium(table1_p(), 0.1, kRd, kV, kSd);
  CHECK(eq.r_e == doctest::Approx(4.4309690646469137).epsilon(1e-12));
  CHECK(eq.s_e == doctest::Approx(19.962368201643473).epsilon(1e-14));
  CHECK(eq.residual < 1e-10);
  CHECK(eq.iterations <= 200);
  CHECK(eq.r_e > kRd);
}

TEST_CASE("equilibrium radius on the effective-slope view") {
  const EquilibriumReport eq = solve_equilibrium(table1_p(), kAlphaEff, kRd, kV, kSd);
  CHECK(eq.r_e == doctest::Approx(4.0751118309725002).epsilon(1e-12));
  CHECK(eq.s_e == doctest::Approx(19.959078500218287).epsilon(1e-14));
  CHECK(eq.residual < 1e-10);
}

TEST_CASE("steady offset shrinks strictly as c1 grows") {
  const double expected[][2] = {{1.0, 0.41312726941235224},
                                {5.0, 0.081571840788549908},
                                {10.0, 0.040921499781712857},
                                {30.0, 0.013679464854726436},
                                {50.0, 0.0082128786019575352}};
  double prev = 1e300;
  for (const auto& [c1, offset] : expected) {
    Gains g = table1_p();
    g.c1 = c1;
    const EquilibriumReport eq = solve_equilibrium(g, kAlphaEff, kRd, kV, kSd);
    CHECK(kSd - eq.s_e == doctest::Approx(offset).epsilon(1e-10));
    CHECK(kSd - eq.s_e < prev);
    prev = kSd - eq.s_e;
  }
  // In the stiff-gain limit the orbit collapses onto the isoline.
  Gains g = table1_p();
  g.c1 = 1e6;
  CHECK(solve_equilibrium(g, kAlphaEff, kRd, kV, kSd).r_e - kRd < 1e-4);
}

TEST_CASE("equilibrium solver input validation") {
  CHECK_THROWS_AS(solve_equilibrium(Gains{}, kAlphaEff, kRd, kV, kSd), std::invalid_argument);
  Gains g = table1_p();
  CHECK_THROWS_AS(solve_equilibrium(g, -1.0, kRd, kV, kSd), std::invalid_argument);
  CHECK_THROWS_AS(solve_equilibrium(g, kAlphaEff, kRd, 0.0, kSd), std::invalid_argument);
}

TEST_CASE("gain-condition checks") {
  const Gains g = table1();
  CHECK(check_p_conditions(g, kAlphaEff, kV));
  CHECK(check_pi_conditions(g, kAlphaEff, kV));

  // Proportional conditions: c1 > 0, alpha*v > c3 > 0, c4 > 0 (all strict).
  Gains bad = g;
  bad.c1 = 0.0;
  CHECK(!check_p_conditions(bad, kAlphaEff, kV));
  bad = g;
  bad.c3 = 1.5;  // exceeds alpha*v = 1
  CHECK(!check_p_conditions(bad, kAlphaEff, kV));
  CHECK(!check_pi_conditions(bad, kAlphaEff, kV));
  bad = g;
  bad.c3 = 1.0;  // equal to alpha*v: strict inequality fails
  CHECK(!check_p_conditions(bad, kAlphaEff, kV));
  bad = g;
  bad.c3 = -0.1;
  CHECK(!check_p_conditions(bad, kAlphaEff, kV));
  bad = g;
  bad.c4 = 0.0;
  CHECK(!check_p_conditions(bad, kAlphaEff, kV));

  // Integral conditions additionally need c1*(c1-2)*v*alpha > c2 >= 0.
  bad = g;
  bad.c1 = 2.0;  // c1*(c1-2)*v*alpha = 0, not > c2
  bad.c2 = 0.1;
  CHECK(check_p_conditions(bad, kAlphaEff, kV));
  CHECK(!check_pi_conditions(bad, kAlphaEff, kV));
  bad = g;
  bad.c2 = 80.0;  // equality: 10*8*0.5*2 = 80, strict > fails
  CHECK(!check_pi_conditions(bad, kAlphaEff, kV));
  bad = g;
  bad.c2 = 79.9;
  CHECK(check_pi_conditions(bad, kAlphaEff, kV));
  bad = g;
  bad.c2 = -0.5;
  CHECK(!check_pi_conditions(bad, kAlphaEff, kV));
}

TEST_CASE("closed-loop matrix entries") {
  const Eigen::Matrix3d a = jacobian_pi(table1(), kAlphaEff, kRd, kV);
  CHECK(a(0, 0) == 0.0);
  CHECK(a(0, 1) == kV);
  CHECK(a(0, 2) == 0.0);
  CHECK(a(1, 0) == doctest::Approx(-5.9695867361573501).epsilon(1e-14));
  CHECK(a(1, 1) == doctest::Approx(-10.0).epsilon(1e-15));
  CHECK(a(1, 2) == 1.0);
  CHECK(a(2, 0) == doctest::Approx(-0.6).epsilon(1e-15));
  CHECK(a(2, 1) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(a(2, 2) == 0.0);
}

TEST_CASE("closed-loop eigenvalues against pinned values and a cubic oracle") {
  const Eigen::Matrix3d a = jacobian_pi(table1(), kAlphaEff, kRd, kV);
  const auto eig = eigenvalues(a);
  CHECK(eig[0].real() == doctest::Approx(-9.5876461173678374).epsilon(1e-10));
  CHECK(eig[1].real() == doctest::Approx(-0.31209514018476608).epsilon(1e-10));
  CHECK(eig[2].real() == doctest::Approx(-0.10025874244739650).epsilon(1e-10));
  for (const auto& ev : eig) CHECK(std::abs(ev.imag()) < 1e-12);

  // Characteristic polynomial coefficients from trace and minors, solved by
  // the trigonometric cubic formula: an independent route to the spectrum.
  const double a2 = -a.trace();
  const double a1 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) -
                    a(0, 2) * a(2, 0) + a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  const double a0 = -a.determinant();
  CHECK(a2 == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(a1 == doctest::Approx(3.9847933680786751).epsilon(1e-13));
  CHECK(a0 == doctest::Approx(0.3).epsilon(1e-13));
  const auto roots = cubic_roots(a2, a1, a0);
  for (int i = 0; i < 3; ++i) {
    CHECK(roots[i] == doctest::Approx(eig[i].real()).epsilon(1e-9));
  }
}

TEST_CASE("candidate Lyapunov pair: pinned coefficients, definiteness, residual") {
  const LyapunovReport rep = lyapunov_matrices(table1(), kAlphaEff, kRd, kV);
  CHECK(rep.mu1 == doctest::Approx(5.9695867361573501).epsilon(1e-14));
  CHECK(rep.mu2 == doctest::Approx(1187.9173472314700).epsilon(1e-13));
  CHECK(rep.mu3 == doctest::Approx(1.9923966840393375).epsilon(1e-14));
  CHECK(rep.mu4 == doctest::Approx(98.993112269289169).epsilon(1e-13));
  CHECK(rep.Q(0, 0) == doctest::Approx(352.77790596336323).epsilon(1e-13));

  // P is positive definite at these gains; the printed Q is not (its lower
  // 2x2 block has negative determinant), and the pair does not satisfy the
  // Lyapunov equation: the residual is reported as data, not asserted away.
  CHECK(rep.p_positive_definite);
  CHECK(!rep.q_positive_definite);
  CHECK(rep.Q(1, 1) * rep.Q(2, 2) - rep.Q(1, 2) * rep.Q(2, 1) < 0.0);
  CHECK(rep.residual == doctest::Approx(282.84271247461901).epsilon(1e-9));
}

TEST_CASE("stability summary ties the pieces together") {
  const StabilityReport rep = stability_report(table1(), kAlphaEff, kRd, kV);
  CHECK(rep.p_conditions);
  CHECK(rep.pi_conditions);
  CHECK(rep.omega_c == doctest::Approx(-0.12331517311882158).epsilon(1e-14));
  CHECK(rep.max_real == doctest::Approx(-0.10025874244739650).epsilon(1e-9));
  CHECK(rep.max_real < 0.0);
}

TEST_CASE("condition-satisfying random gains always yield a Hurwitz matrix") {
  // 1000 draws across slopes, speeds, radii and admissible gains: whenever
  // the integral-loop conditions hold, every eigenvalue sits strictly in the
  // left half-plane and the candidate P is positive definite.
  std::mt19937 rng(20250822);
  std::uniform_real_distribution<double> ualpha(0.8, 2.0), uv(0.2, 1.0), uc1(5.0, 50.0),
      uw(0.3, 0.9), uc4(0.5, 2.0), uu(0.05, 0.95), urd(5.0, 20.0);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const double alpha = ualpha(rng), v = uv(rng), r_d = urd(rng);
    Gains g;
    g.c1 = uc1(rng);
    g.c3 = uw(rng) * alpha * v;
    g.c4 = uc4(rng);
    g.c2 = uu(rng) * g.c1 * (g.c1 - 2.0) * v * alpha;
    REQUIRE(check_pi_conditions(g, alpha, v));
    const StabilityReport rep = stability_report(g, alpha, r_d, v);
    REQUIRE(rep.max_real < 0.0);
    REQUIRE(rep.lyapunov.p_positive_definite);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("proportional-loop linearization: pinned rate and conditioning") {
  const RateReport rep = p_linearization(table1_p(), kAlphaEff, kRd, kV, kSd);
  CHECK(rep.equilibrium.s_e == doctest::Approx(19.959078500218287).epsilon(1e-13));
  CHECK(rep.a21 == doctest::Approx(2.9799275824528851).epsilon(1e-11));
  CHECK(rep.delta == doctest::Approx(88.080289670188460).epsilon(1e-11));
  CHECK(rep.rho == doctest::Approx(0.30744500111643711).epsilon(1e-10));
  CHECK(rep.eigen_a[0].real() == doctest::Approx(-9.6925549988835629).epsilon(1e-10));
  CHECK(rep.eigen_a[1].real() == doctest::Approx(-0.30744500111643711).epsilon(1e-10));
  CHECK(rep.eigvec_condition == doctest::Approx(1.5102698944928186).epsilon(1e-9));
  // The slow eigenvalue is -rho by construction when delta > 0.
  CHECK(rep.rho == doctest::Approx(-rep.eigen_a[1].real()).epsilon(1e-12));
}

TEST_CASE("proportional-loop linearization: oscillatory regime") {
  // c3 far above the feasible slope pushes the discriminant negative; the
  // decay rate is then half the trace.
  Gains g = table1_p();
  g.c3 = 3.0;
  const RateReport rep = p_linearization(g, 1.0, kRd, kV, kSd);
  CHECK(rep.delta < 0.0);
  CHECK(rep.rho == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(rep.eigen_a[0].imag() != 0.0);
  CHECK(rep.eigvec_condition >= 1.0);
}

TEST_CASE("steady-state error bound: pinned example") {
  FieldBounds b;
  b.gamma1 = 0.5;
  b.gamma2 = 1.0;
  b.gamma3 = 0.2;
  Gains g;
  g.c1 = 30.0;
  g.c3 = 0.1;
  g.c4 = 1.0;
  const ErrorBoundReport rep = steady_error_bound(g, b, 0.5, kPi / 4.0);
  CHECK(rep.atanh_argument == doctest::Approx(0.18856180831641267).epsilon(1e-14));
  CHECK(rep.bound == doctest::Approx(0.19084553611247126).epsilon(1e-14));
  CHECK(rep.c1_min_region == doctest::Approx(3.683965705762913).epsilon(1e-13));
  CHECK(rep.c1_min_bound == doctest::Approx(5.6568542494923802).epsilon(1e-13));
  CHECK(rep.c3_ok);

  // Larger gain, smaller bound (monotone in c1).
  g.c1 = 60.0;
  CHECK(steady_error_bound(g, b, 0.5, kPi / 4.0).bound < rep.bound);

  // c3 above the invariance threshold v*gamma1*cos(margin) flips the flag.
  Gains g2 = g;
  g2.c3 = 0.2;
  CHECK(!steady_error_bound(g2, b, 0.5, kPi / 4.0).c3_ok);
}

TEST_CASE("steady-state error bound: vacuous and invalid inputs") {
  FieldBounds b;
  b.gamma1 = 0.5;
  b.gamma2 = 1.0;
  b.gamma3 = 0.2;
  Gains g;
  g.c1 = 4.0;  // below the non-vacuity threshold 4*sqrt(2)
  g.c3 = 0.1;
  g.c4 = 1.0;
  CHECK_THROWS_AS(steady_error_bound(g, b, 0.5, kPi / 4.0), std::domain_error);
  g.c1 = 30.0;
  CHECK_THROWS_AS(steady_error_bound(g, b, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(steady_error_bound(g, b, 0.5, kPi / 2.0), std::invalid_argument);
  FieldBounds flat = b;
  flat.gamma1 = 0.0;
  CHECK_THROWS_AS(steady_error_bound(g, flat, 0.5, kPi / 4.0), std::invalid_argument);
}

TEST_CASE("saturated-ode ultimate bound") {
  CHECK(tanh_ode_bound(1.0, 0.5) == doctest::Approx(0.54930614433405485).epsilon(1e-15));
  CHECK(tanh_ode_bound(2.0, 0.0) == 0.0);
  CHECK(tanh_ode_bound(0.5, 0.4) == doctest::Approx(std::atanh(0.8)).epsilon(1e-15));
  CHECK_THROWS_AS(tanh_ode_bound(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(tanh_ode_bound(0.5, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(tanh_ode_bound(1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(tanh_ode_bound(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("speed convergence time") {
  CHECK(speed_convergence_time(1.0, 0.5, 0.1) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(speed_convergence_time(0.2, 0.5, 0.1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(speed_convergence_time(0.5, 0.5, 0.1) == 0.0);
  CHECK_THROWS_AS(speed_convergence_time(1.0, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(speed_convergence_time(-1.0, 0.5, 0.1), std::invalid_argument);
}
