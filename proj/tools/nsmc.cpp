// nsmc: command-line driver for the measure-controlled Navier-Stokes solver.

#include "nsmc/config.hpp"
#include "nsmc/io.hpp"
#include "nsmc/manufactured.hpp"
#include "nsmc/optimality.hpp"
#include "nsmc/optimizer.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace nsmc;

namespace {

std::string quote(const std::string& s) { return nlohmann::json(s).dump(); }

enum Exit { ok = 0, config_error = 2, solver_error = 3, threshold_error = 4 };

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> checkpoint_every;
};

struct Run {
  RunConfig cfg;
  std::shared_ptr<const Grid> grid;
  ProblemData data;
  fs::path dir;
};

void apply_overrides(RunConfig& cfg, const Common& c) {
  if (!c.out.empty()) cfg.out = c.out;
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  if (c.checkpoint_every) cfg.checkpoint_every = *c.checkpoint_every;
  cfg.validate();
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
}

Run prepare(RunConfig cfg, bool make_dir = true) {
  Run r;
  r.cfg = std::move(cfg);
  r.grid = make_grid(r.cfg.grid);
  r.data = build_problem(r.cfg, *r.grid);
  r.dir = r.cfg.out;
  if (make_dir) fs::create_directories(r.dir);
  return r;
}

template <class F>
fs::path write_text(const fs::path& path, F&& writer) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  writer(os);
  return path;
}

int cmd_solve(const Common& c) {
  RunConfig cfg = load_config(c.config);
  apply_overrides(cfg, c);
  Run r = prepare(cfg);
  const StateTrajectory st = solve_state(*r.grid, r.cfg.solver, r.data.y0, r.data.f0, initial_control(r.cfg));
  std::vector<fs::path> files = write_fields(r.dir, "state", *r.grid, st.y, st.p);
  files.push_back(write_text(r.dir / "energy.csv", [&](std::ostream& os) {
    write_energy_csv(os, kinetic_energy_trace(*r.grid, st), st.dt);
  }));
  files.push_back(write_text(r.dir / "slice_final.csv", [&](std::ostream& os) {
    write_slice_csv(os, *r.grid, st.velocity(*r.grid, st.nt()));
  }));
  std::map<std::string, std::string> results;
  const double J = tracking_value(*r.grid, r.cfg.solver, st, r.data.y_d);
  results["J"] = format_double(J);
  double max_div = 0.0;
  for (int n = 0; n <= st.nt(); ++n) max_div = std::max(max_div, r.grid->max_abs_divergence(st.velocity(*r.grid, n)));
  results["max_abs_divergence"] = format_double(max_div);
  if (r.cfg.y0.kind == "mms") {
    double err = l2q_error(*r.grid, st.dt, st.y, [&] {
      std::vector<Vec> e;
      for (const auto& f : r.data.y_d) e.push_back(r.grid->to_dofs(f));
      return e;
    }());
    results["mms_error"] = format_double(err);
    const auto rows = manufactured_convergence(r.cfg.solver, r.cfg.mms_amplitude, {16, 32, 64}, r.cfg.solver.nt,
                                               {32, 64, 128}, 32);
    files.push_back(write_text(r.dir / "convergence.csv", [&](std::ostream& os) { write_convergence_csv(os, rows); }));
    for (const auto& row : rows) {
      std::cout << row.study << " n=" << row.n << " error=" << format_double(row.error);
      if (row.order) std::cout << " order=" << format_double(*row.order);
      std::cout << '\n';
    }
  }
  write_manifest(r.dir, r.cfg, "solve", files, results);
  std::cout << "J = " << format_double(J) << "\nmax |div| = " << format_double(max_div) << "\nwrote " << r.dir << '\n';
  return ok;
}

int cmd_adjoint(const Common& c) {
  RunConfig cfg = load_config(c.config);
  apply_overrides(cfg, c);
  Run r = prepare(cfg);
  const EvalRecord rec = eval_J(r.grid, r.cfg.solver, r.data, initial_control(r.cfg));
  std::vector<fs::path> files = write_fields(r.dir, "state", *r.grid, rec.state.y, rec.state.p);
  for (auto& p : write_fields(r.dir, "adjoint", *r.grid, rec.adjoint.phi, rec.adjoint.pi)) files.push_back(p);
  files.push_back(write_text(r.dir / "psi.csv", [&](std::ostream& os) { write_psi_csv(os, *r.grid, rec.adjoint); }));
  write_manifest(r.dir, r.cfg, "adjoint", files, {{"J", format_double(rec.j_value)}});
  std::cout << "J = " << format_double(rec.j_value) << "\nwrote " << r.dir << '\n';
  return ok;
}

struct GradcheckFlags {
  double grad_tol = 1e-5;
  double curv_tol = 1e-3;
  double route_tol = 1e-8;
  std::string direction = "random";
  int atoms = 2;
};

int cmd_gradcheck(const Common& c, const GradcheckFlags& g) {
  RunConfig cfg = load_config(c.config);
  apply_overrides(cfg, c);
  Run r = prepare(cfg);
  const EvalRecord rec = eval_J(r.grid, r.cfg.solver, r.data, initial_control(r.cfg));
  const ControlTrajectory v =
      g.direction == "zero"
          ? ControlTrajectory::zeros(r.cfg.solver.nt, r.cfg.solver.T)
          : random_control(r.cfg.grid.omega, r.cfg.solver.nt, r.cfg.solver.T, r.cfg.gamma, g.atoms, r.cfg.seed, 0);
  std::vector<double> eps;
  for (int k = 1; k <= 8; ++k) eps.push_back(std::pow(10.0, -0.5 * k));
  const FdCheck fd = finite_difference_check(rec, v, eps);
  const fs::path csv = write_text(r.dir / "gradcheck.csv", [&](std::ostream& os) {
    os << "kind,eps,fd,exact,rel_err\n";
    for (const FdRow& row : fd.gradient) {
      os << "gradient," << format_double(row.eps) << ',' << format_double(row.fd) << ','
         << format_double(fd.derivative) << ',' << format_double(row.rel_err) << '\n';
    }
    for (const FdRow& row : fd.hessian) {
      os << "curvature," << format_double(row.eps) << ',' << format_double(row.fd) << ','
         << format_double(fd.curvature) << ',' << format_double(row.rel_err) << '\n';
    }
  });
  std::map<std::string, std::string> results;
  if (fd.skipped) {
    results["status"] = quote("skipped");
    write_manifest(r.dir, r.cfg, "gradcheck", {csv}, results);
    std::cout << "direction is zero: skipped\n";
    return ok;
  }
  const bool pass = fd.min_gradient_err <= g.grad_tol && fd.min_curvature_err <= g.curv_tol &&
                    fd.route_rel_err <= g.route_tol;
  results["status"] = quote(pass ? "pass" : "fail");
  results["min_gradient_rel_err"] = format_double(fd.min_gradient_err);
  results["min_curvature_rel_err"] = format_double(fd.min_curvature_err);
  results["curvature_route_rel_err"] = format_double(fd.route_rel_err);
  write_manifest(r.dir, r.cfg, "gradcheck", {csv}, results);
  std::cout << "J'(u)v = " << format_double(fd.derivative) << "  min rel err " << format_double(fd.min_gradient_err)
            << " (tol " << g.grad_tol << ")\n"
            << "J''(u)v^2 = " << format_double(fd.curvature) << "  min rel err " << format_double(fd.min_curvature_err)
            << " (tol " << g.curv_tol << ")\n"
            << "second-order route = " << format_double(fd.curvature_second) << "  rel diff "
            << format_double(fd.route_rel_err) << " (tol " << g.route_tol << ")\n"
            << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? ok : threshold_error;
}

int cmd_optimize(const Common& c) {
  RunConfig cfg = load_config(c.config);
  apply_overrides(cfg, c);
  Run r = prepare(cfg);
  std::vector<fs::path> files;
  const IterateCallback checkpoint = [&](int iter, const ControlTrajectory& u) {
    if (r.cfg.checkpoint_every > 0 && iter % r.cfg.checkpoint_every == 0) {
      files.push_back(write_text(r.dir / ("control_iter" + std::to_string(iter) + ".csv"),
                                 [&](std::ostream& os) { write_control_csv(os, u); }));
    }
  };
  const OptimizeResult res = optimize(r.grid, r.cfg.solver, r.data, initial_control(r.cfg), r.cfg.optimizer, checkpoint);
  files.push_back(write_text(r.dir / "control.csv", [&](std::ostream& os) { write_control_csv(os, res.control); }));
  files.push_back(write_text(r.dir / "iterates.csv", [&](std::ostream& os) { write_iterate_csv(os, res.log); }));
  files.push_back(
      write_text(r.dir / "psi.csv", [&](std::ostream& os) { write_psi_csv(os, *r.grid, res.record.adjoint); }));
  for (auto& p : write_fields(r.dir, "state", *r.grid, res.record.state.y, res.record.state.p)) files.push_back(p);
  for (auto& p : write_fields(r.dir, "adjoint", *r.grid, res.record.adjoint.phi, res.record.adjoint.pi)) {
    files.push_back(p);
  }
  const IterateEntry& last = res.log.entries.back();
  write_manifest(r.dir, r.cfg, "optimize", files,
                 {{"J", format_double(last.J)},
                  {"gap", format_double(last.gap)},
                  {"iterations", std::to_string(last.iter)},
                  {"converged", res.log.converged ? "true" : "false"},
                  {"stop_reason", quote(res.log.stop_reason)}});
  std::cout << "iterations " << last.iter << "  J = " << format_double(last.J) << "  gap = " << format_double(last.gap)
            << "  (" << res.log.stop_reason << ")\nwrote " << r.dir << '\n';
  return ok;
}

Run load_run(const fs::path& dir, const Common& c) {
  RunConfig cfg = load_config(dir / "config.cfg");
  Common o = c;
  if (o.out.empty()) o.out = dir.string();
  apply_overrides(cfg, o);
  return prepare(cfg);
}

ControlTrajectory load_control(const Run& r) {
  const fs::path p = r.dir / "control.csv";
  std::ifstream is(p);
  if (!is) throw ConfigError("run directory has no control.csv: " + p.string());
  try {
    return read_control_csv(is, r.cfg.solver.nt, r.cfg.solver.T);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

int cmd_check(const std::string& run_dir, const Common& c) {
  Run r = load_run(run_dir, c);
  const ControlTrajectory u = load_control(r);
  const EvalRecord rec = eval_J(r.grid, r.cfg.solver, r.data, u);
  const OptimalityReport rep = check_first_order(*r.grid, u, rec.adjoint, r.cfg.gamma);
  const ConeOptions opts{r.cfg.tau, r.cfg.gamma, 1e-9};
  const SecondOrderScan scan = second_order_necessary_scan(rec, r.cfg.n_dirs, r.cfg.seed, opts);
  std::vector<fs::path> files;
  files.push_back(write_text(r.dir / "first_order.csv", [&](std::ostream& os) { write_first_order_csv(os, rep); }));
  files.push_back(write_text(r.dir / "first_order.json", [&](std::ostream& os) { os << first_order_json(rep) << '\n'; }));
  files.push_back(
      write_text(r.dir / "second_order.json", [&](std::ostream& os) { os << second_order_json(scan) << '\n'; }));
  std::cout << "max psi " << format_double(rep.max_psi) << "  tol_psi " << format_double(rep.tol_psi)
            << "\nmax norm gap " << format_double(rep.max_norm_gap) << "\nmax support residual "
            << format_double(rep.max_support_residual) << "\ncritical directions " << scan.n_critical << " of "
            << scan.n_sampled;
  if (scan.min_curvature) std::cout << ", min curvature " << format_double(*scan.min_curvature);
  std::cout << '\n';
  return ok;
}

int cmd_probe(const std::string& run_dir, const Common& c, std::optional<int> n, std::optional<double> radius) {
  Run r = load_run(run_dir, c);
  if (n) r.cfg.probe_samples = *n;
  if (radius) r.cfg.probe_radius = *radius;
  r.cfg.validate();
  const ControlTrajectory u = load_control(r);
  const EvalRecord rec = eval_J(r.grid, r.cfg.solver, r.data, u);
  const GrowthReport g = quadratic_growth_probe(rec, r.cfg.probe_samples, r.cfg.probe_radius, r.cfg.gamma, r.cfg.seed);
  write_text(r.dir / "growth.csv", [&](std::ostream& os) { write_growth_csv(os, g); });
  write_text(r.dir / "growth.json", [&](std::ostream& os) { os << growth_json(g) << '\n'; });
  std::cout << "samples " << g.samples.size() << "  kappa " << (g.kappa ? format_double(*g.kappa) : "null") << '\n';
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse measure-valued optimal control of 2D Navier-Stokes"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", common.config, "INI configuration file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory (overrides run.out)");
    sub->add_option("--seed", common.seed, "random seed (overrides run.seed)");
    sub->add_option("--threads", common.threads, "OpenMP threads")->check(CLI::NonNegativeNumber);
    sub->add_option("--checkpoint-every", common.checkpoint_every, "write the control every K iterations");
  };

  auto* solve = app.add_subcommand("solve", "forward solve with the configured control");
  add_common(solve, true);
  auto* adjoint = app.add_subcommand("adjoint", "forward and adjoint solves");
  add_common(adjoint, true);

  GradcheckFlags gf;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of J' and J''");
  add_common(gradcheck, true);
  gradcheck->add_option("--grad-tol", gf.grad_tol, "threshold on the gradient relative error");
  gradcheck->add_option("--curv-tol", gf.curv_tol, "threshold on the curvature relative error");
  gradcheck->add_option("--route-tol", gf.route_tol, "threshold between the two curvature routes");
  gradcheck->add_option("--direction", gf.direction, "random or zero")->check(CLI::IsMember({"random", "zero"}));
  gradcheck->add_option("--atoms", gf.atoms, "atoms per component and step of the random direction");

  auto* opt = app.add_subcommand("optimize", "conditional gradient minimization");
  add_common(opt, true);

  std::string run_dir;
  auto* check = app.add_subcommand("check", "first- and second-order audit of a run directory");
  check->add_option("run_dir", run_dir, "directory written by optimize")->required()->check(CLI::ExistingDirectory);
  add_common(check, false);

  std::optional<int> probe_n;
  std::optional<double> probe_radius;
  auto* probe = app.add_subcommand("probe", "quadratic growth probe around a run's control");
  probe->add_option("run_dir", run_dir, "directory written by optimize")->required()->check(CLI::ExistingDirectory);
  probe->add_option("-n,--samples", probe_n, "number of perturbations")->check(CLI::NonNegativeNumber);
  probe->add_option("--radius", probe_radius, "perturbation radius");
  add_common(probe, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*solve) return cmd_solve(common);
    if (*adjoint) return cmd_adjoint(common);
    if (*gradcheck) return cmd_gradcheck(common, gf);
    if (*opt) return cmd_optimize(common);
    if (*check) return cmd_check(run_dir, common);
    if (*probe) return cmd_probe(run_dir, common, probe_n, probe_radius);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return config_error;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return solver_error;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return config_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return solver_error;
  }
  return ok;
}
