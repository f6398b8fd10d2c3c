#include "isotrack/studies.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "isotrack/analysis.hpp"
#include "isotrack/sim.hpp"

namespace isotrack {

namespace {

constexpr double kSd = 20.0;
constexpr double kSpeed = 0.5;

std::shared_ptr<const Field> circular_field() {
  return std::make_shared<CircularExpField>(30.0, 0.1, Vec2{5.0, 5.0});
}

// Effective linear slope of the circular field at the target isoline and the
// isoline radius.
constexpr double kAlphaEff = 0.1 * kSd;  // decay * s_d
const double kRd = std::log(30.0 / kSd) / 0.1;

std::shared_ptr<const Field> gaussian_field() {
  return std::make_shared<MultiGaussianField>(std::vector<MultiGaussianField::Component>{
      {20.0, {20.0, 20.0}, 600.0},
      {30.0, {-30.0, -20.0}, 400.0},
      {10.0, {-20.0, 30.0}, 800.0},
  });
}

const Gains kTable1{10.0, 1.0, 0.3, 1.0, 0.0};
const Gains kTable2{10.0, 0.0, 0.1, 1.0, 0.0};
const Gains kTable4{30.0, 0.1, 0.1, 1.0, 0.1};

const std::vector<InitialState> kEightStarts = {
    {{15.0, -5.0}, 0.6 * kPi}, {{15.0, 15.0}, kPi},       {{-5.0, 15.0}, kPi / 2.0},
    {{-5.0, -5.0}, 0.0},       {{6.0, 5.0}, 0.0},         {{5.0, 6.0}, kPi / 2.0},
    {{4.0, 5.0}, kPi},         {{5.0, 4.0}, -kPi / 2.0},
};

void write_trajectory(const std::filesystem::path& file, const Trajectory& traj) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error(file.string() + ": cannot write");
  traj.write_csv(out);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct SummaryBuilder {
  std::ostringstream out;
  bool passed = true;

  void line(const std::string& text) { out << text << '\n'; }
  void check(bool ok, const std::string& text) {
    passed &= ok;
    out << (ok ? "[ok]   " : "[FAIL] ") << text << '\n';
  }
  StudyResult finish(const std::string& name) {
    out << (passed ? "PASS" : "FAIL") << '\n';
    return {name, passed, out.str()};
  }
};

// Heading-error margin maintained over a sample window: the distance of the
// logged phi range from the region boundary {0, -pi}, capped just under
// pi/2 so the bound formulas stay defined.
double phi_margin(const std::vector<TrajectoryRecord>& rows, std::size_t begin) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = begin; i < rows.size(); ++i) {
    if (!logged(rows[i].phi)) continue;
    lo = std::min(lo, rows[i].phi);
    hi = std::max(hi, rows[i].phi);
  }
  if (!std::isfinite(lo)) return 0.0;
  const double margin = std::min(-hi, kPi + lo);
  return std::min(margin, kPi / 2.0 - 1e-6);
}

FieldBounds tube_bounds(const Field& field, const std::vector<TrajectoryRecord>& rows,
                        std::size_t begin) {
  std::vector<Vec2> points;
  points.reserve(rows.size() - begin);
  for (std::size_t i = begin; i < rows.size(); ++i) points.push_back({rows[i].x, rows[i].y});
  return estimate_bounds(field, points);
}

// ---------- the studies ----------

using StudyFn = std::function<StudyResult(const std::filesystem::path&, double)>;

StudyResult study_fig4(const std::filesystem::path& dir, double dt) {
  SummaryBuilder sb;
  sb.line("Tracking from eight initial poses on the circular field (PI gains).");
  SimConfig cfg;
  cfg.field = circular_field();
  cfg.gains = kTable1;
  cfg.v = kSpeed;
  cfg.s_d = kSd;
  cfg.dt = dt > 0.0 ? dt : 0.01;
  cfg.duration = 120.0;
  for (std::size_t i = 0; i < kEightStarts.size(); ++i) {
    cfg.initial = kEightStarts[i];
    const SimResult res = run_simulation(cfg);
    write_trajectory(dir / ("fig4_run_" + std::to_string(i) + ".csv"), res.trajectory);
    const Metrics m = compute_metrics(res.trajectory, cfg.gains, cfg.v, cfg.settle_threshold);
    sb.check(res.status == SimStatus::ok && std::abs(m.final_eps) < 0.05,
             "run " + std::to_string(i) + ": final eps = " + num(m.final_eps) +
                 ", settled at t = " + num(m.settling_time));
  }
  return sb.finish("fig4-initial-states");
}

StudyResult study_fig6(const std::filesystem::path& dir, double dt) {
  SummaryBuilder sb;
  sb.line("Steady-state error versus gains on the circular field.");
  SimConfig cfg;
  cfg.field = circular_field();
  cfg.gains = kTable1;
  cfg.gains.c2 = 0.0;  // proportional-only sweep
  cfg.v = kSpeed;
  cfg.s_d = kSd;
  cfg.dt = dt > 0.0 ? dt : 0.01;
  cfg.duration = 400.0;
  cfg.initial = {{11.0, 5.0}, -kPi / 2.0};

  const std::vector<double> c1s{1.0, 5.0, 10.0, 30.0, 50.0};
  const auto sweep = parameter_sweep(cfg, "c1", c1s);
  std::ofstream out(dir / "fig6_sweep.csv");
  if (!out) throw std::runtime_error("cannot write fig6_sweep.csv");
  out << "c1,c2,steady_state_error,settling_time\n";
  bool decreasing = true;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const auto& pt = sweep[i];
    out << num(pt.value) << ",0," << num(pt.metrics.steady_state_error) << ','
        << num(pt.metrics.settling_time) << '\n';
    if (i > 0) {
      decreasing &= pt.metrics.steady_state_error < sweep[i - 1].metrics.steady_state_error;
    }
    sb.line("c1 = " + num(pt.value) +
            ": steady error = " + num(pt.metrics.steady_state_error));
  }
  sb.check(decreasing, "steady error strictly decreases in c1");

  cfg.gains = kTable1;  // PI comparison point
  const SimResult pi_res = run_simulation(cfg);
  const Metrics pi_m = compute_metrics(pi_res.trajectory, cfg.gains, cfg.v, cfg.settle_threshold);
  out << "10," << num(cfg.gains.c2) << ',' << num(pi_m.steady_state_error) << ','
      << num(pi_m.settling_time) << '\n';
  sb.check(pi_m.steady_state_error < 0.01,
           "integral action drives the steady error below 0.01 (got " +
               num(pi_m.steady_state_error) + ")");
  return sb.finish("fig6-gain-sweep");
}

StudyResult study_fig5(const std::filesystem::path& dir, double dt) {
  SummaryBuilder sb;
  sb.line("Integrator estimate of the orbit rate on the circular field.");
  SimConfig cfg;
  cfg.field = circular_field();
  cfg.gains = kTable1;
  cfg.v = kSpeed;
  cfg.s_d = kSd;
  cfg.dt = dt > 0.0 ? dt : 0.01;
  cfg.duration = 400.0;
  cfg.initial = {{15.0, -5.0}, 0.6 * kPi};
  const SimResult res = run_simulation(cfg);
  write_trajectory(dir / "fig5_integrator.csv", res.trajectory);
  const Metrics m = compute_metrics(res.trajectory, cfg.gains, cfg.v, cfg.settle_threshold);
  const double omega_c = -cfg.v / kRd;
  sb.line("omega_c = " + num(omega_c) + ", c2*sigma(final) = " + num(m.final_sigma_times_c2));
  sb.check(res.status == SimStatus::ok, "run completed");
  sb.check(std::abs(m.final_eps) < 0.01, "final |eps| < 0.01 (got " + num(m.final_eps) + ")");
  sb.check(std::abs(m.final_sigma_times_c2 - omega_c) <= 0.02 * std::abs(omega_c),
           "c2*sigma within 2% of omega_c");
  return sb.finish("fig5-integrator");
}

StudyResult study_multigaussian(const std::filesystem::path& dir, double dt) {
  SummaryBuilder sb;
  sb.line("Isoline tracking on the three-bump Gaussian field.");
  SimConfig cfg;
  cfg.field = gaussian_field();
  cfg.gains = kTable2;
  cfg.v = kSpeed;
  cfg.s_d = 10.0;
  cfg.dt = dt > 0.0 ? dt : 0.01;
  cfg.duration = 600.0;
  cfg.initial = {{0.0, 20.0}, -kPi / 2.0};
  const SimResult res = run_simulation(cfg);
  write_trajectory(dir / "multigaussian_track.csv", res.trajectory);
  const Metrics m = compute_metrics(res.trajectory, cfg.gains, cfg.v, cfg.settle_threshold);
  sb.check(res.status == SimStatus::ok, "run completed");

  const std::size_t begin = res.trajectory.rows.size() / 2;
  const FieldBounds fb = tube_bounds(*cfg.field, res.trajectory.rows, begin);
  const double margin = phi_margin(res.trajectory.rows, begin);
  sb.line("visited-tube bounds: gamma1 = " + num(fb.gamma1) + ", gamma2 = " + num(fb.gamma2) +
          ", gamma3 = " + num(fb.gamma3) + ", margin = " + num(margin));
  if (margin > 0.0) {
    const ErrorBoundReport bound = steady_error_bound(cfg.gains, fb, cfg.v, margin);
    sb.line("steady-error bound = " + num(bound.bound) + ", measured = " +
            num(m.steady_state_error));
    sb.check(m.steady_state_error <= bound.bound, "steady error within the predicted bound");
  } else {
    sb.check(false, "heading error never maintained a margin inside (-pi, 0)");
  }
  return sb.finish("multigaussian-track");
}

StudyResult study_c1_sweep_gaussian(const std::filesystem::path& dir, double dt) {
  SummaryBuilder sb;
  sb.line("Proportional-gain sweep on the three-bump Gaussian field.");
  SimConfig cfg;
  cfg.field = gaussian_field();
  cfg.gains = kTable2;
  cfg.v = kSpeed;
  cfg.s_d = 10.0;
  cfg.dt = dt > 0.0 ? dt : 0.01;
  cfg.duration = 600.0;
  cfg.initial = {{0.0, 20.0}, -kPi / 2.0};
  const std::vector<double> c1s{1.0, 5.0, 10.0, 30.0, 50.0};
  const auto sweep = parameter_sweep(cfg, "c1", c1s);
  std::ofstream out(dir / "c1_sweep_gaussian.csv");
  if (!out) throw std::runtime_error("cannot write c1_sweep_gaussian.csv");
  out << "c1,steady_state_error,settling_time\n";
  bool decreasing = true;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    out << num(sweep[i].value) << ',' << num(sweep[i].metrics.steady_state_error) << ','
        << num(sweep[i].metrics.settling_time) << '\n';
    sb.line("c1 = " + num(sweep[i].value) +
            ": steady error = " + num(sweep[i].metrics.steady_state_error));
    if (i > 0) {
      decreasing &=
          sweep[i].metrics.steady_state_error < sweep[i - 1].metrics.steady_state_error;
    }
  }
  sb.check(decreasing, "steady error strictly decreases in c1");
  return sb.finish("c1-sweep-gaussian");
}

StudyResult study_single_int_identity(const std::filesystem::path& dir, double dt) {
  SummaryBuilder sb;
  sb.line("Single-integrator vehicle against the equivalent steering vehicle.");
  SimConfig base;
  base.field = gaussian_field();
  base.gains = kTable2;
  base.v = kSpeed;
  base.s_d = 10.0;
  base.dt = dt > 0.0 ? dt : 1e-3;
  base.duration = 100.0;
  base.sdot_mode = SdotMode::oracle;
  base.hold = HoldMode::continuous;

  SimConfig single = base;
  single.vehicle = VehicleKind::single_integrator;
  single.initial = {{0.0, 20.0}, 0.0};
  const SimResult rs = run_simulation(single);

  SimConfig dubins = base;
  dubins.vehicle = VehicleKind::dubins;
  const double s0 = base.field->value({0.0, 20.0});
  dubins.initial = {{0.0, 20.0}, base.gains.c1 * s0};  // matches the integrator's heading output
  const SimResult rd = run_simulation(dubins);

  write_trajectory(dir / "identity_single.csv", rs.trajectory);
  write_trajectory(dir / "identity_dubins.csv", rd.trajectory);

  double gap = 0.0;
  const std::size_t n = std::min(rs.trajectory.rows.size(), rd.trajectory.rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    gap = std::max(gap, std::hypot(rs.trajectory.rows[i].x - rd.trajectory.rows[i].x,
                                   rs.trajectory.rows[i].y - rd.trajectory.rows[i].y));
  }
  sb.line("max position gap over " + num(base.duration) + " s: " + num(gap));
  sb.check(rs.status == SimStatus::ok && rd.status == SimStatus::ok, "both runs completed");
  sb.check(gap < 1e-6, "trajectories identical within 1e-6");
  return sb.finish("single-int-identity");
}

StudyResult study_double_int_speed(const std::filesystem::path& dir, double dt) {
  SummaryBuilder sb;
  sb.line("Speed regulation of the double-integrator vehicle.");
  SimConfig cfg;
  cfg.field = circular_field();
  cfg.vehicle = VehicleKind::double_integrator;
  cfg.gains = kTable4;
  cfg.v = kSpeed;
  cfg.s_d = kSd;
  cfg.dt = dt > 0.0 ? dt : 1e-3;
  cfg.duration = 20.0;
  cfg.sdot_mode = SdotMode::oracle;
  cfg.initial = {{5.0 + kRd, 5.0}, -kPi / 2.0, 1.0};
  const SimResult res = run_simulation(cfg);
  write_trajectory(dir / "double_int_speed.csv", res.trajectory);

  const double t_pred = speed_convergence_time(1.0, cfg.v, cfg.gains.c5);
  const double band = 2.0 * cfg.gains.c5 * cfg.dt;
  double t_reach = std::numeric_limits<double>::infinity();
  double worst_after = 0.0;
  for (const auto& r : res.trajectory.rows) {
    const double dev = std::abs(std::hypot(r.vx, r.vy) - cfg.v);
    if (std::isinf(t_reach)) {
      if (dev < band) t_reach = r.t;
    } else {
      worst_after = std::max(worst_after, dev);
    }
  }
  sb.line("predicted reach time = " + num(t_pred) + " s, first in band at t = " + num(t_reach));
  sb.check(res.status == SimStatus::ok, "run completed");
  sb.check(t_reach <= t_pred + 5.0 * cfg.dt, "speed reaches the band by the predicted time");
  sb.check(worst_after < band, "speed stays within the chattering band (worst " +
                                   num(worst_after) + " vs " + num(band) + ")");
  return sb.finish("double-int-speed");
}

const std::map<std::string, StudyFn>& registry() {
  static const std::map<std::string, StudyFn> reg = {
      {"fig4-initial-states", study_fig4},
      {"fig6-gain-sweep", study_fig6},
      {"fig5-integrator", study_fig5},
      {"multigaussian-track", study_multigaussian},
      {"c1-sweep-gaussian", study_c1_sweep_gaussian},
      {"single-int-identity", study_single_int_identity},
      {"double-int-speed", study_double_int_speed},
  };
  return reg;
}

}  // namespace

std::vector<std::string> list_studies() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

StudyResult run_study(const std::string& name, const std::filesystem::path& out_dir,
                      double dt_override) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown study: " + name);
  std::filesystem::create_directories(out_dir);
  StudyResult result = it->second(out_dir, dt_override);
  std::ofstream summary(out_dir / "summary.txt");
  if (summary) summary << result.summary;
  return result;
}

}  // namespace isotrack
