#pragma once

#include <cstdio>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gcf/analysis.hpp"
#include "gcf/barriers.hpp"
#include "gcf/io.hpp"
#include "gcf/solver.hpp"

namespace gcf {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;  // a check failed, or the run itself failed
inline constexpr int config = 2;   // bad flags, unreadable or invalid configuration
}  // namespace exit_code

/// Checks run by `verify` when the config lists none.
inline std::vector<std::string> default_checks(const Trajectory& traj) {
  std::vector<std::string> names{"bounds"};
  if (traj.sigma() == 1.0) names.emplace_back("no_cutoff");
  if (traj.metadata.far_field_c) {
    names.emplace_back("gradient_range");
    names.emplace_back("decay");
    names.emplace_back("comparison");
  }
  if (trajectory_min(traj) >= 0.5 * traj.metadata.m) names.emplace_back("bernstein");
  return names;
}

/// Runs the named checkers. A checker whose precondition does not hold yields
/// a failing report carrying the reason.
inline std::vector<InvariantReport> run_checks(const Trajectory& traj,
                                               const std::vector<std::string>& names,
                                               double epsilon) {
  std::vector<InvariantReport> out;
  for (const auto& name : names) {
    try {
      if (name == "bounds") {
        out.push_back(check_bounds(traj));
      } else if (name == "no_cutoff") {
        out.push_back(check_no_cutoff(traj));
      } else if (name == "gradient_range") {
        out.push_back(check_gradient_range(traj));
      } else if (name == "bernstein") {
        out.push_back(check_bernstein(traj));
      } else if (name == "decay") {
        out.push_back(check_decay(traj, epsilon).report);
      } else if (name == "comparison") {
        const auto decay = check_decay(traj, epsilon);
        out.push_back(comparison_check(traj, decay.barrier, BarrierSide::Upper));
        out.push_back(comparison_check(traj, decay.barrier, BarrierSide::Lower));
      } else {
        throw ValidationError("checks: unknown checker '" + name + "'");
      }
    } catch (const PreconditionViolation& e) {
      auto r = named_report(name);
      r.pass = false;
      r.note = e.what();
      out.push_back(r);
    }
  }
  return out;
}

namespace detail {

inline std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline void print_report_line(std::ostream& out, const InvariantReport& r) {
  out << (r.pass ? (r.inconclusive ? "[INCONCLUSIVE] " : "[PASS] ") : "[FAIL] ") << r.name
      << "  worst_violation=" << fmt(r.worst_violation) << "  tol=" << fmt(r.tolerance_used)
      << "  at (x=" << fmt(r.location.x) << ", t=" << fmt(r.location.t) << ")";
  if (!r.note.empty()) out << "  " << r.note;
  out << '\n';
}

}  // namespace detail

/// Entry point of the `gcf` command-line tool. args[0] is the program name.
/// Output goes to `out`, diagnostics to `err`.
inline int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                        std::ostream& err) {
  CLI::App app{"Gauss curvature flow of rotational graphs: solver and invariant checks", "gcf"};
  app.require_subcommand(1);

  std::string config_path, out_path, format_name, trajectory_path, kind_name = "space";
  std::optional<double> epsilon, time;
  double sup_f = 1.0, r0 = 1.0, m = 1.0, horizon = 1.0, half_width = 20.0, margin = 0.25;
  int n_theta = 32, levels = 3;

  auto* simulate = app.add_subcommand("simulate", "run the solver and write the trajectory");
  simulate->add_option("--config", config_path, "run configuration (JSON)")->required();
  simulate->add_option("--out", out_path, "trajectory output path");
  simulate->add_option("--format", format_name, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  auto* verify = app.add_subcommand("verify", "run invariant checks and write a JSON report");
  verify->add_option("--config", config_path, "run configuration (JSON)")->required();
  verify->add_option("--trajectory", trajectory_path, "check this trajectory instead of simulating");
  verify->add_option("--out", out_path, "report output path");
  verify->add_option("--epsilon", epsilon, "decay threshold");

  auto* barrier = app.add_subcommand("barrier", "print barrier parameters and residual extrema");
  barrier->add_option("--config", config_path, "take sup f, R0, m, T from this configuration");
  barrier->add_option("--epsilon", epsilon, "decay threshold (default 0.1)");
  barrier->add_option("--sup", sup_f, "sup f");
  barrier->add_option("--R0", r0, "support radius of f - c");
  barrier->add_option("--m", m, "inf f");
  barrier->add_option("--T", horizon, "time horizon");
  barrier->add_option("--L", half_width, "lattice half-width");
  barrier->add_option("--lambda-margin", margin, "lambda = (4/m)(1 + margin)");

  auto* mesh = app.add_subcommand("mesh", "export the surface of revolution as Wavefront OBJ");
  mesh->add_option("--config", config_path, "run configuration (JSON)");
  mesh->add_option("--trajectory", trajectory_path, "use this trajectory instead of simulating");
  mesh->add_option("--time", time, "snapshot time (nearest snapshot is used)");
  mesh->add_option("--n-theta", n_theta, "angular subdivisions")->check(CLI::Range(3, 1 << 20));
  mesh->add_option("--out", out_path, "OBJ output path");

  auto* convergence = app.add_subcommand("convergence", "print a refinement table");
  convergence->add_option("--config", config_path, "run configuration (JSON)")->required();
  convergence->add_option("--levels", levels, "refinement levels (>= 3)")->check(CLI::Range(3, 12));
  convergence->add_option("--kind", kind_name, "space | time")->check(CLI::IsMember({"space", "time"}));

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return exit_code::config;
  }

  std::optional<RunConfig> rc;
  try {
    if (!config_path.empty()) rc = parse_config(config_path);
    if (!format_name.empty()) rc->format = parse_format(format_name);
  } catch (const Error& e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_code::config;
  }

  auto load_or_run = [&]() -> Trajectory {
    if (!trajectory_path.empty()) return read_trajectory(trajectory_path);
    if (!rc) throw ValidationError("need --config or --trajectory");
    return evolve(rc->solver);
  };

  try {
    if (*simulate) {
      const auto traj = evolve(rc->solver);
      const std::string path = out_path.empty() ? rc->output : out_path;
      write_trajectory(traj, path, rc->format);
      out << "wrote " << traj.snapshot_count() << " snapshots (" << traj.stats.steps
          << " steps, dt=" << detail::fmt(traj.stats.dt) << ") to " << path << '\n';
      if (rc->mesh.enabled) {
        export_mesh(traj, rc->mesh.time, rc->mesh.n_theta, rc->mesh.path);
        out << "wrote mesh to " << rc->mesh.path << '\n';
      }
      return exit_code::ok;
    }

    if (*verify) {
      const auto traj = load_or_run();
      const double eps = epsilon.value_or(rc->epsilon);
      const auto names = rc->checks.empty() ? default_checks(traj) : rc->checks;
      const auto reports = run_checks(traj, names, eps);
      const std::string path = out_path.empty() ? rc->report : out_path;
      write_text(path, reports_to_json(reports).dump(2) + "\n");
      bool all = true;
      for (const auto& r : reports) {
        detail::print_report_line(out, r);
        all = all && r.pass;
      }
      out << (all ? "all checks passed" : "some checks failed") << "; report: " << path << '\n';
      return all ? exit_code::ok : exit_code::failure;
    }

    if (*barrier) {
      if (rc) {
        const auto& p = rc->solver.profile;
        sup_f = p.sup_f();
        r0 = p.support_radius();
        m = p.m();
        horizon = rc->solver.t_end;
        half_width = rc->solver.grid.half_width();
      }
      const double eps = epsilon.value_or(0.1);
      const auto params = choose_decay_params(eps, sup_f, r0, m, horizon);
      const double lambda = choose_lambda(m, margin);
      const double K = decay_radius(params.h, params.w, eps);
      const DecayBarrier decay{1.0, eps, params.h, params.w, std::nullopt};
      const CoshBarrier cosh{sup_f, 1.0, half_width, lambda};
      const auto decay_field = barrier_residual(decay, m, half_width, horizon);
      const auto cosh_field = barrier_residual(cosh, m, half_width, horizon);
      out << "h = " << detail::fmt(params.h) << '\n'
          << "w = " << detail::fmt(params.w) << "  (strict bound " << detail::fmt(params.w_bound)
          << ")\n"
          << "lambda = " << detail::fmt(lambda) << '\n'
          << "K = " << detail::fmt(K) << '\n'
          << "decay residual: max = " << detail::fmt(decay_field.max_value)
          << ", min = " << detail::fmt(decay_field.min_value) << '\n'
          << "cosh residual: max = " << detail::fmt(cosh_field.max_value)
          << ", min = " << detail::fmt(cosh_field.min_value) << '\n';
      return decay_field.negative() && cosh_field.negative() ? exit_code::ok : exit_code::failure;
    }

    if (*mesh) {
      const auto traj = load_or_run();
      const double t = time.value_or(rc ? rc->mesh.time : traj.times.back());
      const int nt = mesh->count("--n-theta") > 0 || !rc ? n_theta : rc->mesh.n_theta;
      const std::string path = !out_path.empty() ? out_path : (rc ? rc->mesh.path : "surface.obj");
      const auto surface = build_mesh(traj, t, nt);
      write_text(path, mesh_obj(surface));
      out << "wrote " << surface.vertices.size() << " vertices, " << surface.triangles.size()
          << " triangles (t = " << detail::fmt(surface.time) << ") to " << path << '\n';
      return exit_code::ok;
    }

    if (*convergence) {
      const auto kind = kind_name == "time" ? Refinement::Time : Refinement::Space;
      const auto study = convergence_order(rc->solver, levels, kind);
      out << "level        dx            dt    difference     order\n";
      for (std::size_t j = 0; j < study.dx.size(); ++j) {
        out << detail::fmt(static_cast<double>(j), "%5.0f") << detail::fmt(study.dx[j], "%14.6e")
            << detail::fmt(study.dt[j], "%14.6e");
        if (j < study.differences.size()) out << detail::fmt(study.differences[j], "%14.6e");
        if (j >= 1 && j - 1 < study.orders.size()) out << detail::fmt(study.orders[j - 1], "%10.4f");
        out << '\n';
      }
      out << "estimated order: " << (study.order ? detail::fmt(*study.order) : "n/a") << '\n';
      return exit_code::ok;
    }
  } catch (const ParseError& e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const ValidationError& e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::failure;
  }
  return exit_code::config;
}

}  // namespace gcf
