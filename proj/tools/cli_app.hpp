#pragma once

// Command-line front end. run_cli is the whole program; main() only forwards
// argv, so tests drive it in-process.
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 divergence,
// 3 assertion or verification failure.

#include "egsolve/analysis.hpp"
#include "egsolve/experiments.hpp"
#include "egsolve/operators.hpp"
#include "egsolve/solver.hpp"
#include "egsolve/stepsize.hpp"
#include "egsolve/trace_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace egsolve::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDivergence = 2;
inline constexpr int kExitFailure = 3;

inline std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const std::string& part : egsolve::detail::split(s, ',')) out.push_back(egsolve::detail::parse_real(part, what));
  return out;
}

inline ZooParams parse_zoo_params(const std::vector<std::string>& kvs, std::uint64_t seed) {
  ZooParams p;
  p.seed = seed;
  for (const std::string& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(Errc::ParseError, "operator parameter '" + kv + "' is not name=value");
    p.scalars[kv.substr(0, eq)] = egsolve::detail::parse_real(kv.substr(eq + 1), kv);
  }
  return p;
}

inline Vec parse_x0(const std::string& s, std::size_t dim) {
  if (s.empty()) return Vec(Vector::Ones(static_cast<Eigen::Index>(dim)));
  Vec x(parse_list(s, "--x0"));
  if (x.dim() != dim)
    throw Error(Errc::DimensionMismatch, "--x0 has " + std::to_string(x.dim()) + " entries, operator needs " +
                                             std::to_string(dim));
  return x;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
  os << text;
}

struct OperatorArgs {
  std::string op;
  std::vector<std::string> params;
  std::uint64_t seed = 42;

  void attach(CLI::App* cmd) {
    cmd->add_option("--op", op, "operator key: " + zoo_keys())->required();
    cmd->add_option("--param", params, "operator parameter name=value (repeatable)");
    cmd->add_option("--seed", seed, "seed for seeded operator data")->capture_default_str();
  }
  OperatorInstance build() const { return build_operator(op, parse_zoo_params(params, seed)); }
};

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extragradient solver with adaptive step sizes for (L0, L1)-Lipschitz operators", "egsolve"};
  app.set_config("--config", "", "INI file; [section] names select subcommands");
  app.require_subcommand(1);

  // solve
  OperatorArgs solve_op;
  std::string solve_policy, solve_x0, solve_out;
  std::size_t solve_iters = 1000, solve_stride = 1;
  double solve_tol = 1e-14;
  bool solve_force = false;
  auto* solve_cmd = app.add_subcommand("solve", "run the extragradient method and write its trace")->configurable();
  solve_op.attach(solve_cmd);
  solve_cmd->add_option("--policy", solve_policy, std::string("step-size policy: ") + kPolicyKeyHelp)->required();
  solve_cmd->add_option("--x0", solve_x0, "comma-separated start point (default all ones)");
  solve_cmd->add_option("--iters", solve_iters, "iteration budget")->capture_default_str();
  solve_cmd->add_option("--tol", solve_tol, "stop once ||F(x_k)|| <= tol")->capture_default_str();
  solve_cmd->add_option("--stride", solve_stride, "record every n-th iterate")->capture_default_str();
  solve_cmd->add_option("--out", solve_out, "trace CSV path");
  solve_cmd->add_flag("--force", solve_force, "run even if the policy does not match the operator's class");

  // sweep
  OperatorArgs sweep_op;
  std::string sweep_c0 = "10,100,1000", sweep_c1 = "0.1,1,10", sweep_x0, sweep_out;
  std::size_t sweep_iters = 1000;
  double sweep_tol = 1e-10, sweep_alpha = 1.0;
  bool sweep_half = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "grid over adaptive (c0, c1)")->configurable();
  sweep_op.attach(sweep_cmd);
  sweep_cmd->add_option("--c0", sweep_c0, "comma-separated c0 grid")->capture_default_str();
  sweep_cmd->add_option("--c1", sweep_c1, "comma-separated c1 grid")->capture_default_str();
  sweep_cmd->add_option("--alpha", sweep_alpha, "exponent on ||F||")->capture_default_str();
  sweep_cmd->add_flag("--half", sweep_half, "use omega = gamma / 2");
  sweep_cmd->add_option("--x0", sweep_x0, "comma-separated start point (default all ones)");
  sweep_cmd->add_option("--iters", sweep_iters, "iteration budget per cell")->capture_default_str();
  sweep_cmd->add_option("--tol", sweep_tol, "stop once ||F(x_k)|| <= tol")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "summary CSV path (stdout when absent)");

  // reproduce
  std::string repro_fig, repro_out;
  std::uint64_t repro_seed = 42;
  std::optional<std::size_t> repro_iters;
  auto* repro_cmd = app.add_subcommand("reproduce", "run a named experiment and check its orderings")->configurable();
  repro_cmd->add_option("figure", repro_fig, "fig3, fig4 or fig5")->required()->check(CLI::IsMember({"fig3", "fig4", "fig5"}));
  repro_cmd->add_option("--out", repro_out, "output directory (default out/<figure>)");
  repro_cmd->add_option("--seed", repro_seed, "seed (fig4 matrices and start point)")->capture_default_str();
  repro_cmd->add_option("--iters", repro_iters, "iteration budget override");

  // verify
  OperatorArgs verify_op;
  std::optional<double> v_alpha, v_L0, v_L1;
  std::optional<double> v_box;
  std::size_t v_grid = 201, v_samples = 0, v_pairs = 1000, v_theta = 101;
  bool v_segment = false;
  auto* verify_cmd = app.add_subcommand("verify", "check ||J|| <= L0 + L1 ||F||^alpha over a box")->configurable();
  verify_op.attach(verify_cmd);
  verify_cmd->add_option("--alpha", v_alpha, "alpha (default: declared)");
  verify_cmd->add_option("--L0", v_L0, "L0 (default: declared)");
  verify_cmd->add_option("--L1", v_L1, "L1 (default: declared)");
  verify_cmd->add_option("--box", v_box, "half-width of the cube (default 50 in 2-d, 5 otherwise)");
  verify_cmd->add_option("--grid", v_grid, "grid points per axis")->capture_default_str();
  verify_cmd->add_option("--samples", v_samples, "use this many random points instead of a grid");
  verify_cmd->add_flag("--segment", v_segment, "also run the segment (pairwise) check");
  verify_cmd->add_option("--pairs", v_pairs, "pairs for the segment check")->capture_default_str();
  verify_cmd->add_option("--theta", v_theta, "theta grid for the segment check")->capture_default_str();

  // estimate
  OperatorArgs est_op;
  bool est_grid = false, est_force = false;
  std::string est_policy = "const:0.01", est_x0, est_out, est_alphas = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  std::size_t est_iters = 1000, est_grid_n = 101;
  std::optional<double> est_box;
  auto* est_cmd = app.add_subcommand("estimate", "fit (alpha, L0, L1) to a Jacobian/operator scatter")->configurable();
  est_op.attach(est_cmd);
  est_cmd->add_flag("--from-grid", est_grid, "sample a grid instead of a solver trace");
  est_cmd->add_option("--box", est_box, "grid half-width (default 50 in 2-d, 5 otherwise)");
  est_cmd->add_option("--grid", est_grid_n, "grid points per axis")->capture_default_str();
  est_cmd->add_option("--policy", est_policy, "policy for the trace source")->capture_default_str();
  est_cmd->add_option("--x0", est_x0, "start point for the trace source (default all ones)");
  est_cmd->add_option("--iters", est_iters, "trace length")->capture_default_str();
  est_cmd->add_flag("--force", est_force, "run the trace even on a class mismatch");
  est_cmd->add_option("--alpha-grid", est_alphas, "comma-separated alpha candidates")->capture_default_str();
  est_cmd->add_option("--out", est_out, "directory for scatter.csv and fit.csv");

  // nu
  std::string nu_kind;
  auto* nu_cmd = app.add_subcommand("nu", "print a nu-equation root")->configurable();
  std::vector<std::string> nu_names;
  for (NuKind k : kAllNuKinds) nu_names.emplace_back(to_string(k));
  nu_cmd->add_option("kind", nu_kind, "equation kind")->required()->check(CLI::IsMember(nu_names));

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*solve_cmd) {
      const OperatorInstance op = solve_op.build();
      const StepSizePolicy policy = parse_policy(solve_policy);
      SolveConfig cfg;
      cfg.x0 = parse_x0(solve_x0, op.dim);
      cfg.max_iters = solve_iters;
      cfg.stop_tol = solve_tol;
      cfg.trace_stride = solve_stride;
      cfg.force = solve_force;
      const SolveTrace t = solve(op, policy, cfg);
      for (const auto& w : t.warnings) err << "warning: " << w << '\n';
      if (!solve_out.empty()) {
        std::ostringstream os;
        write_trace_csv(os, t);
        write_text(solve_out, os.str());
      }
      out << "iters=" << t.summary.iterations_run << " min_normF=" << fmt_real(t.summary.min_norm_F_xk);
      if (t.summary.final_dist_sq) out << " final_dist_sq=" << fmt_real(*t.summary.final_dist_sq);
      out << " reason=" << to_string(t.summary.reason) << '\n';
      return kExitOk;
    }

    if (*sweep_cmd) {
      SweepConfig cfg;
      cfg.op_key = sweep_op.op;
      cfg.op_params = parse_zoo_params(sweep_op.params, sweep_op.seed);
      cfg.c0_grid = parse_list(sweep_c0, "--c0");
      cfg.c1_grid = parse_list(sweep_c1, "--c1");
      cfg.alpha = sweep_alpha;
      cfg.half_omega = sweep_half;
      cfg.x0 = parse_x0(sweep_x0, build_operator(cfg.op_key, cfg.op_params).dim);
      cfg.iters = sweep_iters;
      cfg.tol = sweep_tol;
      const std::string csv = sweep_csv(run_sweep(cfg));
      if (sweep_out.empty()) out << csv;
      else write_text(sweep_out, csv);
      return kExitOk;
    }

    if (*repro_cmd) {
      const std::filesystem::path dir = repro_out.empty() ? std::filesystem::path("out") / repro_fig : std::filesystem::path(repro_out);
      ExperimentReport report;
      if (repro_fig == "fig3") {
        Fig3Config c;
        if (repro_iters) c.iters = *repro_iters;
        report = reproduce_fig3(c, dir).report;
      } else if (repro_fig == "fig4") {
        Fig4Config c;
        c.seed = repro_seed;
        if (repro_iters) c.iters = *repro_iters;
        report = reproduce_fig4(c, dir).report;
      } else {
        Fig5Config c;
        if (repro_iters) c.iters = *repro_iters;
        report = reproduce_fig5(c, dir).report;
      }
      for (const Check& c : report.checks)
        out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
      out << "wrote " << report.files.size() << " files to " << dir.string() << '\n';
      return report.passed() ? kExitOk : kExitFailure;
    }

    if (*verify_cmd) {
      const OperatorInstance op = verify_op.build();
      const SmoothnessParams s(v_alpha.value_or(op.smoothness.alpha), v_L0.value_or(op.smoothness.L0),
                               v_L1.value_or(op.smoothness.L1));
      const Box box = Box::cube(op.dim, v_box.value_or(op.dim <= 2 ? 50.0 : 5.0));
      const bool sampled = v_samples > 0 || op.dim > 3;
      const SmoothnessFit fit = sampled ? verify_condition_sampled(op, s, box, v_samples > 0 ? v_samples : 10000,
                                                                   verify_op.seed)
                                        : verify_condition(op, s, box, v_grid);
      bool ok = passes(fit);
      out << "jacobian " << (ok ? "pass" : "fail") << " max_violation=" << fmt_real(fit.max_violation) << '\n';
      if (v_segment) {
        const PairReport seg = verify_segment_condition(op, s, v_pairs, v_theta, box, verify_op.seed);
        out << "segment " << (seg.passed() ? "pass" : "fail") << " violations=" << seg.violations << '/'
            << seg.checked << '\n';
        ok = ok && seg.passed();
      }
      return ok ? kExitOk : kExitFailure;
    }

    if (*est_cmd) {
      const OperatorInstance op = est_op.build();
      std::vector<ScatterSample> samples;
      if (est_grid) {
        samples = scatter_from_grid(op, Box::cube(op.dim, est_box.value_or(op.dim <= 2 ? 50.0 : 5.0)), est_grid_n);
      } else {
        SolveConfig cfg;
        cfg.x0 = parse_x0(est_x0, op.dim);
        cfg.max_iters = est_iters;
        cfg.force = est_force;
        samples = scatter_from_trace(op, solve(op, parse_policy(est_policy), cfg));
      }
      const SmoothnessFit fit = fit_constants(samples, parse_list(est_alphas, "--alpha-grid"));
      if (!est_out.empty()) {
        std::ostringstream sc, fc;
        write_scatter_csv(sc, samples);
        write_fit_csv(fc, fit);
        write_text(std::filesystem::path(est_out) / "scatter.csv", sc.str());
        write_text(std::filesystem::path(est_out) / "fit.csv", fc.str());
      }
      out << "alpha=" << fmt_real(fit.alpha_hat) << " L0=" << fmt_real(fit.L0_hat) << " L1=" << fmt_real(fit.L1_hat)
          << " max_violation=" << fmt_real(fit.max_violation) << '\n';
      return kExitOk;
    }

    if (*nu_cmd) {
      out << fmt_real(nu(*parse_nu_kind(nu_kind))) << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what();
    if (e.iteration()) err << " (iteration " << *e.iteration() << ")";
    err << '\n';
    return e.code() == Errc::NonFiniteIterate ? kExitDivergence : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace egsolve::cli
