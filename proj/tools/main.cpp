// Command-line front end: run scenarios, analyze closed-loop properties,
// reproduce canned studies, and sweep controller parameters.
//
// Exit codes: 0 success; 1 input/validation error; 2 runtime divergence or
// failed study thresholds; 3 analysis ran but the gain conditions fail.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "isotrack/analysis.hpp"
#include "isotrack/scenario.hpp"
#include "isotrack/sim.hpp"
#include "isotrack/studies.hpp"

namespace fs = std::filesystem;
using namespace isotrack;

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct CommonOpts {
  std::string out = ".";
  double dt = 0.0;          // 0 = keep the scenario's dt
  std::string mode;         // empty = keep the scenario's sdot mode
  std::string format = "csv";
};

// Applies the --dt / --mode overrides onto a parsed scenario.
void apply_overrides(Scenario& sc, const CommonOpts& opts) {
  if (opts.dt > 0.0) sc.dt = opts.dt;
  if (opts.mode == "oracle") sc.sdot_mode = SdotMode::oracle;
  if (opts.mode == "measured") sc.sdot_mode = SdotMode::measured;
}

void print_equilibrium(std::ostream& os, const EquilibriumReport& eq) {
  os << "equilibrium:\n"
     << "  r_e = " << num(eq.r_e) << "\n"
     << "  s_e = " << num(eq.s_e) << "\n"
     << "  residual = " << num(eq.residual) << " (" << eq.iterations << " iterations)\n";
}

void print_stability(std::ostream& os, const StabilityReport& st) {
  os << "conditions:\n"
     << "  proportional: " << (st.p_conditions ? "satisfied" : "violated") << "\n"
     << "  proportional-integral: " << (st.pi_conditions ? "satisfied" : "violated") << "\n"
     << "orbit rate omega_c = " << num(st.omega_c) << "\n"
     << "closed-loop matrix A:\n";
  for (int i = 0; i < 3; ++i) {
    os << "  [" << num(st.A(i, 0)) << ", " << num(st.A(i, 1)) << ", " << num(st.A(i, 2))
       << "]\n";
  }
  os << "eigenvalues:";
  for (const auto& ev : st.eigen_a) {
    os << " (" << num(ev.real()) << (ev.imag() < 0 ? " - " : " + ")
       << num(std::abs(ev.imag())) << "i)";
  }
  os << "\nmax real part = " << num(st.max_real) << "\n"
     << "candidate Lyapunov pair: P "
     << (st.lyapunov.p_positive_definite ? "positive definite" : "indefinite") << ", Q "
     << (st.lyapunov.q_positive_definite ? "positive definite" : "indefinite")
     << ", residual |A'P + PA + Q| = " << num(st.lyapunov.residual) << "\n";
}

void print_rate(std::ostream& os, const RateReport& rate) {
  os << "proportional-only local rate:\n"
     << "  a21 = " << num(rate.a21) << ", delta = " << num(rate.delta) << "\n"
     << "  rho = " << num(rate.rho) << "\n"
     << "  eigenvector condition = " << num(rate.eigvec_condition) << "\n";
}

void print_bounds(std::ostream& os, const FieldBounds& b) {
  os << "field envelope (" << b.samples << " samples):\n"
     << "  gamma1 = " << num(b.gamma1) << " (min gradient)\n"
     << "  gamma2 = " << num(b.gamma2) << " (max gradient)\n"
     << "  gamma3 = " << num(b.gamma3) << " (max curvature)\n";
}

void print_error_bound(std::ostream& os, const ErrorBoundReport& eb) {
  os << "steady-state error bound = " << num(eb.bound) << " (atanh argument "
     << num(eb.atanh_argument) << ")\n"
     << "  c1 thresholds: region " << num(eb.c1_min_region) << ", bound "
     << num(eb.c1_min_bound) << "\n";
}

void print_metrics(std::ostream& os, const Metrics& m, const SimResult& res) {
  const char* status = res.status == SimStatus::ok          ? "ok"
                       : res.status == SimStatus::diverged ? "diverged"
                                                           : "left-domain";
  os << "  status = " << status;
  if (res.status != SimStatus::ok) os << " (" << res.message << ")";
  os << "\n  final s = " << num(m.final_s) << ", final eps = " << num(m.final_eps) << "\n"
     << "  steady-state error = " << num(m.steady_state_error) << "\n"
     << "  settling time = " << num(m.settling_time) << "\n";
  if (std::isfinite(m.final_sigma_times_c2)) {
    os << "  c2*sigma(final) = " << num(m.final_sigma_times_c2) << "\n";
  }
  if (std::isfinite(m.max_speed_deviation)) {
    os << "  speed deviation in [" << num(m.min_speed_deviation) << ", "
       << num(m.max_speed_deviation) << "]\n";
  }
}

int cmd_run(const std::string& path, const CommonOpts& opts) {
  Scenario sc;
  try {
    sc = load_scenario(path);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  apply_overrides(sc, opts);

  const fs::path out_dir = opts.out;
  const fs::path base_dir = fs::path(path).parent_path();
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  std::ostringstream report;
  report << "scenario: " << sc.name << "\n";
  int exit_code = 0;
  try {
    for (std::size_t i = 0; i < sc.initial_states.size(); ++i) {
      const SimConfig cfg = make_sim_config(sc, i, base_dir);
      const SimResult res = run_simulation(cfg);
      const fs::path csv = out_dir / (sc.name + "_run_" + std::to_string(i) + ".csv");
      std::ofstream os(csv);
      if (!os) {
        std::cerr << "error: cannot write " << csv.string() << "\n";
        return 1;
      }
      res.trajectory.write_csv(os);
      const Metrics m = compute_metrics(res.trajectory, cfg.gains, cfg.v, cfg.settle_threshold);
      report << "run " << i << " (" << csv.filename().string() << "):\n";
      print_metrics(report, m, res);
      if (res.status != SimStatus::ok) {
        std::cerr << "run " << i << " stopped at step " << res.fail_step << ": "
                  << res.message << "\n";
        exit_code = 2;
      }
    }
    if (const auto view = radial_view(sc)) {
      const EquilibriumReport eq =
          solve_equilibrium(sc.gains, view->alpha, view->r_d, sc.v, sc.s_d);
      print_equilibrium(report, eq);
      print_stability(report, stability_report(sc.gains, view->alpha, view->r_d, sc.v));
    }
    if (sc.bounds) {
      print_bounds(report,
                   estimate_bounds(*make_field(sc, base_dir), sc.bounds->lo, sc.bounds->hi,
                                   sc.bounds->step));
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }

  std::ofstream rep(out_dir / "report.txt");
  if (rep) rep << report.str();
  std::cout << report.str();
  return exit_code;
}

int cmd_analyze(const std::string& path, const CommonOpts& opts) {
  Scenario sc;
  try {
    sc = load_scenario(path);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  apply_overrides(sc, opts);
  const fs::path base_dir = fs::path(path).parent_path();

  try {
    if (const auto view = radial_view(sc)) {
      std::cout << "scenario: " << sc.name << "\n"
                << "radial profile: slope = " << num(view->alpha)
                << ", target radius = " << num(view->r_d) << "\n";
      print_equilibrium(std::cout, solve_equilibrium(sc.gains, view->alpha, view->r_d, sc.v,
                                                     sc.s_d));
      const StabilityReport st = stability_report(sc.gains, view->alpha, view->r_d, sc.v);
      print_stability(std::cout, st);
      if (sc.gains.c2 == 0.0) {
        print_rate(std::cout,
                   p_linearization(sc.gains, view->alpha, view->r_d, sc.v, sc.s_d));
      }
      const bool ok = sc.gains.c2 > 0.0 ? st.pi_conditions : st.p_conditions;
      return ok ? 0 : 3;
    }
    if (!sc.bounds) {
      std::cerr << "error: this field has no radial profile; provide bounds.min/max/step "
                   "for an envelope analysis\n";
      return 1;
    }
    std::cout << "scenario: " << sc.name << "\n";
    const FieldBounds fb = estimate_bounds(*make_field(sc, base_dir), sc.bounds->lo,
                                           sc.bounds->hi, sc.bounds->step);
    print_bounds(std::cout, fb);
    const double margin = kPi / 4.0;
    std::cout << "at heading-error margin " << num(margin) << ":\n";
    print_error_bound(std::cout, steady_error_bound(sc.gains, fb, sc.v, margin));
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}

int cmd_reproduce(const std::string& study, const CommonOpts& opts) {
  try {
    const StudyResult result = run_study(study, opts.out, opts.dt);
    std::cout << result.summary;
    return result.passed ? 0 : 2;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << "\navailable studies:\n";
    for (const auto& name : list_studies()) std::cerr << "  " << name << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}

int cmd_sweep(const std::string& path, const CommonOpts& opts) {
  Scenario sc;
  try {
    sc = load_scenario(path);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  apply_overrides(sc, opts);
  if (!sc.sweep) {
    std::cerr << "error: scenario has no sweep.parameter/sweep.values\n";
    return 1;
  }

  const fs::path out_dir = opts.out;
  const fs::path base_dir = fs::path(path).parent_path();
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  try {
    const SimConfig base = make_sim_config(sc, 0, base_dir);
    const auto points = parameter_sweep(base, sc.sweep->parameter, sc.sweep->values);
    const fs::path csv = out_dir / "sweep.csv";
    std::ofstream os(csv);
    if (!os) {
      std::cerr << "error: cannot write " << csv.string() << "\n";
      return 1;
    }
    os << sc.sweep->parameter
       << ",steady_state_error,settling_time,final_s,final_eps,status\n";
    int exit_code = 0;
    for (const auto& pt : points) {
      const char* status = pt.status == SimStatus::ok         ? "ok"
                           : pt.status == SimStatus::diverged ? "diverged"
                                                              : "left-domain";
      os << num(pt.value) << ',' << num(pt.metrics.steady_state_error) << ','
         << num(pt.metrics.settling_time) << ',' << num(pt.metrics.final_s) << ','
         << num(pt.metrics.final_eps) << ',' << status << '\n';
      std::cout << sc.sweep->parameter << " = " << num(pt.value)
                << ": steady-state error = " << num(pt.metrics.steady_state_error) << " ("
                << status << ")\n";
      if (pt.status != SimStatus::ok) exit_code = 2;
    }
    return exit_code;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isoline tracking with concentration feedback: simulator and analysis"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string scenario_path;
  std::string study_name;

  auto add_common = [&opts](CLI::App* cmd, bool with_format) {
    cmd->add_option("--out", opts.out, "Output directory")->capture_default_str();
    cmd->add_option("--dt", opts.dt, "Override the integration step (seconds)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--mode", opts.mode, "Concentration-rate source")
        ->check(CLI::IsMember({"oracle", "measured"}));
    if (with_format) {
      cmd->add_option("--format", opts.format, "Trajectory output format")
          ->check(CLI::IsMember({"csv"}))
          ->capture_default_str();
    }
  };

  CLI::App* run = app.add_subcommand("run", "Simulate a scenario and write trajectories");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  add_common(run, true);

  CLI::App* analyze =
      app.add_subcommand("analyze", "Equilibrium, gain conditions, and stability report");
  analyze->add_option("scenario", scenario_path, "Scenario file")->required();
  add_common(analyze, false);

  CLI::App* reproduce =
      app.add_subcommand("reproduce", "Run a named study and check its thresholds");
  reproduce->add_option("study", study_name, "Study name")->required();
  add_common(reproduce, false);

  CLI::App* sweep = app.add_subcommand("sweep", "Run a scenario's parameter sweep");
  sweep->add_option("scenario", scenario_path, "Scenario file")->required();
  add_common(sweep, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (app.got_subcommand(run)) return cmd_run(scenario_path, opts);
  if (app.got_subcommand(analyze)) return cmd_analyze(scenario_path, opts);
  if (app.got_subcommand(reproduce)) return cmd_reproduce(study_name, opts);
  if (app.got_subcommand(sweep)) return cmd_sweep(scenario_path, opts);
  return 1;
}
