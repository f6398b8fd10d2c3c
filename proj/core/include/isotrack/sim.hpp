#pragma once

// Fixed-step closed-loop simulation for the three vehicle models, trajectory
// logging, metrics, and parameter sweeps. Everything is deterministic: no
// randomness, no threads, identical configs produce bit-identical logs.

#include <array>
#include <cstddef>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isotrack/controllers.hpp"
#include "isotrack/fields.hpp"
#include "isotrack/vehicles.hpp"

namespace isotrack {

// ---------- integrator ----------

// Classical 4th-order Runge-Kutta step for scalar state.
// Throws std::runtime_error on a non-finite stage derivative.
template <class F>
double rk4_step(F&& f, double y, double dt) {
  const double k1 = f(y);
  const double k2 = f(y + 0.5 * dt * k1);
  const double k3 = f(y + 0.5 * dt * k2);
  const double k4 = f(y + dt * k3);
  if (!std::isfinite(k1) || !std::isfinite(k2) || !std::isfinite(k3) || !std::isfinite(k4)) {
    throw std::runtime_error("non-finite derivative in rk4_step");
  }
  return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Same for a fixed-size state vector.
template <std::size_t N, class F>
std::array<double, N> rk4_step(F&& f, const std::array<double, N>& y, double dt) {
  using State = std::array<double, N>;
  const auto shifted = [&](const State& base, double h, const State& k) {
    State out;
    for (std::size_t i = 0; i < N; ++i) out[i] = base[i] + h * k[i];
    return out;
  };
  const State k1 = f(y);
  const State k2 = f(shifted(y, 0.5 * dt, k1));
  const State k3 = f(shifted(y, 0.5 * dt, k2));
  const State k4 = f(shifted(y, dt, k3));
  State out;
  for (std::size_t i = 0; i < N; ++i) {
    const double slope = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    if (!std::isfinite(slope)) throw std::runtime_error("non-finite derivative in rk4_step");
    out[i] = y[i] + dt * slope;
  }
  return out;
}

// ---------- configuration ----------

enum class VehicleKind { dubins, single_integrator, double_integrator };

// measured: the concentration rate fed to the controller is the backward
//      difference of sampled readings (0 on the first step) — the only
//      information a real sensor provides.
// oracle: the exact rate grad F . velocity, for numerical studies.
enum class SdotMode { measured, oracle };

// zoh: the command is computed once per step from sampled measurements and
//      held across the RK4 substeps (a sampled controller).
// continuous: integrator states join the ODE and the command is re-evaluated
//      inside every RK4 stage from instantaneous measurements; requires
//      oracle sdot. Used where exact trajectory identities matter.
enum class HoldMode { zoh, continuous };

struct InitialState {
  Vec2 p;
  double theta = 0.0;  // Dubins heading / double-integrator velocity direction
  double speed = std::numeric_limits<double>::quiet_NaN();  // double-integrator |v|; NaN = use v

  // NaN speeds (both "use v") compare equal so scenario round-trips are exact.
  friend bool operator==(const InitialState& a, const InitialState& b) {
    const bool na = std::isnan(a.speed), nb = std::isnan(b.speed);
    return a.p == b.p && a.theta == b.theta && (na ? nb : (!nb && a.speed == b.speed));
  }
};

struct SimConfig {
  std::shared_ptr<const Field> field;
  VehicleKind vehicle = VehicleKind::dubins;
  Gains gains;
  double v = 0.5;    // commanded speed
  double s_d = 0.0;  // target concentration
  double dt = 0.01;
  double duration = 0.0;
  InitialState initial;
  SdotMode sdot_mode = SdotMode::measured;
  HoldMode hold = HoldMode::zoh;
  double sgn_delta = 0.0;          // speed-regulator sign smoothing (0 = exact)
  double settle_threshold = 0.05;  // |eps| threshold for settling_time
};

// Throws std::invalid_argument describing the first violated requirement.
void validate(const SimConfig& cfg);

// ---------- trajectory ----------

// One record per sample; fields that do not apply to the vehicle/field are
// NaN and serialize as empty CSV cells.
struct TrajectoryRecord {
  double t, x, y, theta, vx, vy, s, eps, sdot, e, omega, sigma, zeta, r, phi;
};

inline bool logged(double v) { return !std::isnan(v); }

inline constexpr std::string_view kTrajectoryHeader =
    "t,x,y,theta,vx,vy,s,eps,sdot,e,omega,sigma,zeta,r,phi";

struct Trajectory {
  std::vector<TrajectoryRecord> rows;
  void write_csv(std::ostream& out) const;
};

enum class SimStatus { ok, diverged, left_domain };

struct SimResult {
  Trajectory trajectory;
  SimStatus status = SimStatus::ok;
  std::size_t fail_step = 0;   // step index at which the run stopped early
  std::string message;         // human-readable failure description
};

SimResult run_simulation(const SimConfig& cfg);

// ---------- metrics ----------

struct Metrics {
  double steady_state_error = 0.0;   // mean |eps| over the final 10% of samples
  double settling_time = 0.0;        // first t after which |eps| stays < threshold
  double final_sigma_times_c2 = 0.0; // c2 * sigma at the last sample (NaN if no sigma)
  double min_speed_deviation = 0.0;  // min/max of |velocity| - v over the run
  double max_speed_deviation = 0.0;  // (NaN when no velocity columns are logged)
  double final_s = 0.0;
  double final_eps = 0.0;
};

Metrics compute_metrics(const Trajectory& traj, const Gains& g, double v,
                        double settle_threshold = 0.05);

// ---------- sweeps ----------

struct SweepPoint {
  double value = 0.0;
  Metrics metrics;
  SimStatus status = SimStatus::ok;
};

// Runs one simulation per value with the named parameter replaced.
// parameter must be one of: c1, c2, c3, c4, c5, v, dt.
std::vector<SweepPoint> parameter_sweep(const SimConfig& base, std::string_view parameter,
                                        std::span<const double> values);

}  // namespace isotrack
