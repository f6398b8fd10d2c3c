#include "isotrack/sim.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace isotrack {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TrajectoryRecord blank_record(double t) {
  return {t, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
}

// Diagnostics must never kill a run: fall back to NaN when the gradient is
// unavailable (e.g. a grid-edge stencil or the field source).
PolarDiagnostics safe_diagnostics(const Field& field, Vec2 p, double heading) {
  try {
    return polar_diagnostics(field, p, heading);
  } catch (const std::exception&) {
    return {kNaN, kNaN};
  }
}

struct StepOutcome {
  SimStatus status = SimStatus::ok;
  std::size_t step = 0;
  std::string message;
};

[[nodiscard]] StepOutcome fail(SimStatus status, std::size_t step, const std::string& what) {
  return {status, step, "step " + std::to_string(step) + ": " + what};
}

template <std::size_t N>
bool all_finite(const std::array<double, N>& y) {
  for (double v : y) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Shared driver skeleton: `sample` logs the record for the current state and
// returns the advance function's inputs; `advance` integrates one step.
// Splitting per vehicle keeps each loop readable instead.

class Runner {
 public:
  explicit Runner(const SimConfig& cfg)
      : cfg_(cfg), n_steps_(static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt))) {
    result_.trajectory.rows.reserve(n_steps_ + 1);
  }

  SimResult run() {
    switch (cfg_.vehicle) {
      case VehicleKind::dubins: run_dubins(); break;
      case VehicleKind::single_integrator: run_single(); break;
      case VehicleKind::double_integrator: run_double(); break;
    }
    return std::move(result_);
  }

 private:
  const SimConfig& cfg_;
  std::size_t n_steps_;
  SimResult result_;
  ControllerState cs_;

  const Field& field() const { return *cfg_.field; }
  double dt() const { return cfg_.dt; }
  const Gains& g() const { return cfg_.gains; }

  void stop(const StepOutcome& o) {
    result_.status = o.status;
    result_.fail_step = o.step;
    result_.message = o.message;
  }

  // ----- Dubins -----

  void run_dubins() {
    std::array<double, 4> y{cfg_.initial.p.x, cfg_.initial.p.y, cfg_.initial.theta, 0.0};
    const bool continuous = cfg_.hold == HoldMode::continuous;
    for (std::size_t k = 0; k <= n_steps_; ++k) {
      const double t = static_cast<double>(k) * dt();
      const Vec2 p{y[0], y[1]};
      const double theta = y[2];
      double omega = 0.0;
      try {
        const double s = field().value(p);
        const double eps = s - cfg_.s_d;
        const Vec2 vel = cfg_.v * heading_vector(theta);
        double sdot;
        if (cfg_.sdot_mode == SdotMode::oracle) {
          sdot = field().gradient(p).dot(vel);
        } else {
          sdot = estimate_sdot(cs_, s, dt());
        }
        const double e = sliding_error(eps, sdot, g().c3, g().c4);
        double sigma;
        if (continuous) {
          sigma = y[3];
        } else {
          sigma = accumulate_sigma(cs_, e, dt());
        }
        omega = pi_angular_rate(g(), e, sigma);

        TrajectoryRecord rec = blank_record(t);
        rec.x = p.x;
        rec.y = p.y;
        rec.theta = wrap_angle(theta);
        rec.s = s;
        rec.eps = eps;
        rec.sdot = sdot;
        rec.e = e;
        rec.omega = omega;
        rec.sigma = sigma;
        const PolarDiagnostics d = safe_diagnostics(field(), p, theta);
        rec.r = d.r;
        rec.phi = d.phi;
        result_.trajectory.rows.push_back(rec);
      } catch (const std::domain_error& ex) {
        stop(fail(SimStatus::left_domain, k, ex.what()));
        return;
      }
      if (k == n_steps_) break;
      try {
        if (continuous) {
          const auto deriv = [&](const std::array<double, 4>& z) -> std::array<double, 4> {
            const Vec2 zp{z[0], z[1]};
            const Vec2 vel = cfg_.v * heading_vector(z[2]);
            const double e =
                sliding_error(field().value(zp) - cfg_.s_d, field().gradient(zp).dot(vel),
                              g().c3, g().c4);
            return {vel.x, vel.y, pi_angular_rate(g(), e, z[3]), e};
          };
          y = rk4_step(deriv, y, dt());
        } else {
          const auto deriv = [&](const std::array<double, 4>& z) -> std::array<double, 4> {
            return {cfg_.v * std::cos(z[2]), cfg_.v * std::sin(z[2]), omega, 0.0};
          };
          y = rk4_step(deriv, y, dt());
        }
      } catch (const std::domain_error& ex) {
        stop(fail(SimStatus::left_domain, k + 1, ex.what()));
        return;
      } catch (const std::runtime_error& ex) {
        stop(fail(SimStatus::diverged, k + 1, ex.what()));
        return;
      }
      if (!all_finite(y)) {
        stop(fail(SimStatus::diverged, k + 1, "non-finite state"));
        return;
      }
    }
  }

  // ----- single integrator -----

  void run_single() {
    std::array<double, 3> y{cfg_.initial.p.x, cfg_.initial.p.y, 0.0};  // x, y, zeta
    const bool continuous = cfg_.hold == HoldMode::continuous;
    for (std::size_t k = 0; k <= n_steps_; ++k) {
      const double t = static_cast<double>(k) * dt();
      const Vec2 p{y[0], y[1]};
      Vec2 vel;
      try {
        const double s = field().value(p);
        const double eps = s - cfg_.s_d;
        const double w = std::tanh(eps / g().c4);
        double zeta;
        if (continuous) {
          zeta = y[2];
        } else {
          zeta = accumulate_zeta(cs_, w, dt());
        }
        const double theta1 = single_integrator_heading(g(), s, zeta);
        vel = cfg_.v * heading_vector(theta1);
        double sdot;
        if (cfg_.sdot_mode == SdotMode::oracle) {
          sdot = field().gradient(p).dot(vel);
        } else {
          sdot = estimate_sdot(cs_, s, dt());
        }
        const double e = sliding_error(eps, sdot, g().c3, g().c4);

        TrajectoryRecord rec = blank_record(t);
        rec.x = p.x;
        rec.y = p.y;
        rec.theta = wrap_angle(theta1);
        rec.vx = vel.x;
        rec.vy = vel.y;
        rec.s = s;
        rec.eps = eps;
        rec.sdot = sdot;
        rec.e = e;
        rec.zeta = zeta;
        const PolarDiagnostics d = safe_diagnostics(field(), p, theta1);
        rec.r = d.r;
        rec.phi = d.phi;
        result_.trajectory.rows.push_back(rec);
      } catch (const std::domain_error& ex) {
        stop(fail(SimStatus::left_domain, k, ex.what()));
        return;
      }
      if (k == n_steps_) break;
      try {
        if (continuous) {
          const auto deriv = [&](const std::array<double, 3>& z) -> std::array<double, 3> {
            const Vec2 zp{z[0], z[1]};
            const double s = field().value(zp);
            const double theta1 = single_integrator_heading(g(), s, z[2]);
            const Vec2 zvel = cfg_.v * heading_vector(theta1);
            return {zvel.x, zvel.y, std::tanh((s - cfg_.s_d) / g().c4)};
          };
          y = rk4_step(deriv, y, dt());
        } else {
          // Velocity and zeta's slope are held constant across the step.
          const double w_held = cs_.prev_w;
          const auto deriv = [&](const std::array<double, 3>&) -> std::array<double, 3> {
            return {vel.x, vel.y, w_held};
          };
          y = rk4_step(deriv, y, dt());
          y[2] = cs_.zeta;  // the trapezoidal accumulator is authoritative under zoh
        }
      } catch (const std::domain_error& ex) {
        stop(fail(SimStatus::left_domain, k + 1, ex.what()));
        return;
      } catch (const std::runtime_error& ex) {
        stop(fail(SimStatus::diverged, k + 1, ex.what()));
        return;
      }
      if (!all_finite(y)) {
        stop(fail(SimStatus::diverged, k + 1, "non-finite state"));
        return;
      }
    }
  }

  // ----- double integrator -----

  void run_double() {
    const double speed0 =
        std::isnan(cfg_.initial.speed) ? cfg_.v : cfg_.initial.speed;
    const Vec2 v0 = speed0 * heading_vector(cfg_.initial.theta);
    std::array<double, 5> y{cfg_.initial.p.x, cfg_.initial.p.y, v0.x, v0.y, 0.0};
    const bool continuous = cfg_.hold == HoldMode::continuous;
    for (std::size_t k = 0; k <= n_steps_; ++k) {
      const double t = static_cast<double>(k) * dt();
      const Vec2 p{y[0], y[1]};
      const Vec2 v2{y[2], y[3]};
      Vec2 accel;
      try {
        const double s = field().value(p);
        const double eps = s - cfg_.s_d;
        double sdot;
        if (cfg_.sdot_mode == SdotMode::oracle) {
          sdot = field().gradient(p).dot(v2);
        } else {
          sdot = estimate_sdot(cs_, s, dt());
        }
        const double e = sliding_error(eps, sdot, g().c3, g().c4);
        double sigma;
        if (continuous) {
          sigma = y[4];
        } else {
          sigma = accumulate_sigma(cs_, e, dt());
        }
        const double omega = pi_angular_rate(g(), e, sigma);
        accel = double_integrator_accel(g(), v2, omega, cfg_.v, cfg_.sgn_delta);

        const double heading = std::atan2(v2.y, v2.x);
        TrajectoryRecord rec = blank_record(t);
        rec.x = p.x;
        rec.y = p.y;
        rec.theta = wrap_angle(heading);
        rec.vx = v2.x;
        rec.vy = v2.y;
        rec.s = s;
        rec.eps = eps;
        rec.sdot = sdot;
        rec.e = e;
        rec.omega = omega;
        rec.sigma = sigma;
        const PolarDiagnostics d = safe_diagnostics(field(), p, heading);
        rec.r = d.r;
        rec.phi = d.phi;
        result_.trajectory.rows.push_back(rec);
      } catch (const std::domain_error& ex) {
        stop(fail(SimStatus::left_domain, k, ex.what()));
        return;
      }
      if (k == n_steps_) break;
      try {
        if (continuous) {
          const auto deriv = [&](const std::array<double, 5>& z) -> std::array<double, 5> {
            const Vec2 zp{z[0], z[1]};
            const Vec2 zv{z[2], z[3]};
            const double e = sliding_error(field().value(zp) - cfg_.s_d,
                                           field().gradient(zp).dot(zv), g().c3, g().c4);
            const double omega = pi_angular_rate(g(), e, z[4]);
            const Vec2 a = double_integrator_accel(g(), zv, omega, cfg_.v, cfg_.sgn_delta);
            return {zv.x, zv.y, a.x, a.y, e};
          };
          y = rk4_step(deriv, y, dt());
        } else {
          const auto deriv = [&](const std::array<double, 5>& z) -> std::array<double, 5> {
            return {z[2], z[3], accel.x, accel.y, 0.0};
          };
          y = rk4_step(deriv, y, dt());
        }
      } catch (const std::domain_error& ex) {
        stop(fail(SimStatus::left_domain, k + 1, ex.what()));
        return;
      } catch (const std::runtime_error& ex) {
        stop(fail(SimStatus::diverged, k + 1, ex.what()));
        return;
      }
      if (!all_finite(y)) {
        stop(fail(SimStatus::diverged, k + 1, "non-finite state"));
        return;
      }
    }
  }
};

}  // namespace

void validate(const SimConfig& cfg) {
  if (!cfg.field) throw std::invalid_argument("field is required");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(cfg.duration >= 0.0)) throw std::invalid_argument("duration must be non-negative");
  if (cfg.duration > 0.0 && cfg.dt > cfg.duration * (1.0 + 1e-12)) {
    throw std::invalid_argument("dt must not exceed duration");
  }
  if (!(cfg.v > 0.0)) throw std::invalid_argument("speed v must be positive");
  if (!std::isfinite(cfg.s_d)) throw std::invalid_argument("target s_d must be finite");
  if (!(cfg.gains.c4 > 0.0)) throw std::invalid_argument("c4 must be positive");
  if (cfg.vehicle == VehicleKind::double_integrator && !(cfg.gains.c5 > 0.0)) {
    throw std::invalid_argument("c5 must be positive for the double integrator");
  }
  if (cfg.hold == HoldMode::continuous && cfg.sdot_mode != SdotMode::oracle) {
    throw std::invalid_argument("continuous hold requires the oracle sdot mode");
  }
  if (!(cfg.sgn_delta >= 0.0)) throw std::invalid_argument("sgn_delta must be non-negative");
  if (!(cfg.settle_threshold > 0.0)) {
    throw std::invalid_argument("settle_threshold must be positive");
  }
  if (!std::isnan(cfg.initial.speed) && !(cfg.initial.speed >= 0.0)) {
    throw std::invalid_argument("initial speed must be non-negative");
  }
  if (!std::isfinite(cfg.initial.p.x) || !std::isfinite(cfg.initial.p.y) ||
      !std::isfinite(cfg.initial.theta)) {
    throw std::invalid_argument("initial state must be finite");
  }
}

SimResult run_simulation(const SimConfig& cfg) {
  validate(cfg);
  return Runner(cfg).run();
}

// ---------- CSV ----------

void Trajectory::write_csv(std::ostream& out) const {
  out << kTrajectoryHeader << '\n';
  char buf[32];
  const auto cell = [&](double v, char sep) {
    if (logged(v)) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf;
    }
    out << sep;
  };
  for (const TrajectoryRecord& r : rows) {
    cell(r.t, ',');
    cell(r.x, ',');
    cell(r.y, ',');
    cell(r.theta, ',');
    cell(r.vx, ',');
    cell(r.vy, ',');
    cell(r.s, ',');
    cell(r.eps, ',');
    cell(r.sdot, ',');
    cell(r.e, ',');
    cell(r.omega, ',');
    cell(r.sigma, ',');
    cell(r.zeta, ',');
    cell(r.r, ',');
    cell(r.phi, '\n');
  }
}

// ---------- metrics ----------

Metrics compute_metrics(const Trajectory& traj, const Gains& g, double v,
                        double settle_threshold) {
  if (traj.rows.empty()) throw std::invalid_argument("trajectory is empty");
  const auto& rows = traj.rows;
  const std::size_t n = rows.size();

  Metrics m;
  const std::size_t tail = std::max<std::size_t>(1, (n + 9) / 10);
  double sum = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) sum += std::abs(rows[i].eps);
  m.steady_state_error = sum / static_cast<double>(tail);

  // Last sample at or above the threshold decides the settling time.
  std::size_t last_above = n;  // sentinel: never above
  for (std::size_t i = n; i-- > 0;) {
    if (std::abs(rows[i].eps) >= settle_threshold) {
      last_above = i;
      break;
    }
  }
  if (last_above == n) {
    m.settling_time = rows.front().t;
  } else if (last_above == n - 1) {
    m.settling_time = std::numeric_limits<double>::infinity();
  } else {
    m.settling_time = rows[last_above + 1].t;
  }

  m.final_sigma_times_c2 = logged(rows.back().sigma) ? g.c2 * rows.back().sigma : kNaN;

  double dev_min = std::numeric_limits<double>::infinity();
  double dev_max = -std::numeric_limits<double>::infinity();
  bool any_speed = false;
  for (const TrajectoryRecord& r : rows) {
    if (logged(r.vx) && logged(r.vy)) {
      const double dev = std::hypot(r.vx, r.vy) - v;
      dev_min = std::min(dev_min, dev);
      dev_max = std::max(dev_max, dev);
      any_speed = true;
    }
  }
  m.min_speed_deviation = any_speed ? dev_min : kNaN;
  m.max_speed_deviation = any_speed ? dev_max : kNaN;

  m.final_s = rows.back().s;
  m.final_eps = rows.back().eps;
  return m;
}

// ---------- sweeps ----------

namespace {

void apply_parameter(SimConfig& cfg, std::string_view parameter, double value) {
  if (parameter == "c1") cfg.gains.c1 = value;
  else if (parameter == "c2") cfg.gains.c2 = value;
  else if (parameter == "c3") cfg.gains.c3 = value;
  else if (parameter == "c4") cfg.gains.c4 = value;
  else if (parameter == "c5") cfg.gains.c5 = value;
  else if (parameter == "v") cfg.v = value;
  else if (parameter == "dt") cfg.dt = value;
  else throw std::invalid_argument("unknown sweep parameter: " + std::string(parameter));
}

}  // namespace

std::vector<SweepPoint> parameter_sweep(const SimConfig& base, std::string_view parameter,
                                        std::span<const double> values) {
  std::vector<SweepPoint> out;
  out.reserve(values.size());
  for (double value : values) {
    SimConfig cfg = base;
    apply_parameter(cfg, parameter, value);
    SimResult res = run_simulation(cfg);
    SweepPoint pt;
    pt.value = value;
    pt.status = res.status;
    if (!res.trajectory.rows.empty()) {
      pt.metrics = compute_metrics(res.trajectory, cfg.gains, cfg.v, cfg.settle_threshold);
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace isotrack
