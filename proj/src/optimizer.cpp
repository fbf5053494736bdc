#include "nsmc/optimizer.hpp"

#include "nsmc/kernels.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace nsmc {

void CgmConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("optimizer config: " + msg); };
  if (!(gamma >= 0.0)) fail("gamma must be nonnegative");
  if (max_iter < 0) fail("max_iter must be nonnegative");
  if (!(armijo_c > 0.0 && armijo_c < 0.5)) fail("armijo_c must lie in (0, 1/2)");
  if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0)) fail("armijo_shrink must lie in (0, 1)");
  if (!(stop_tol > 0.0)) fail("stop_tol must be positive");
  if (!(prune_tol >= 0.0)) fail("prune_tol must be nonnegative");
}

namespace {

VectorAtomicMeasure extremal(const Grid& grid, const Vec& phi, double gamma,
                             const std::array<std::vector<int>, 2>& dofs) {
  VectorAtomicMeasure m;
  const std::span<const double> values(phi.data(), static_cast<std::size_t>(phi.size()));
  for (Component c : kComponents) {
    const kernels::ArgMax a = kernels::abs_argmax(values, dofs[index_of(c)]);
    if (a.value > 0.0 && gamma > 0.0) {
      const OmegaNode& node = grid.omega_nodes(c)[a.position];
      const double w = phi[node.dof] > 0.0 ? -gamma : gamma;
      m[c] = ScalarAtomicMeasure({{node.position, w}});
    }
  }
  return m;
}

std::array<std::vector<int>, 2> omega_dofs(const Grid& grid) {
  std::array<std::vector<int>, 2> out;
  for (Component c : kComponents) {
    for (const OmegaNode& node : grid.omega_nodes(c)) out[index_of(c)].push_back(node.dof);
  }
  return out;
}

}  // namespace

ControlTrajectory lmo(const Grid& grid, const AdjointTrajectory& adj, double gamma) {
  const int nt = adj.nt();
  const auto dofs = omega_dofs(grid);
  std::vector<VectorAtomicMeasure> values(static_cast<std::size_t>(nt));
#pragma omp parallel for schedule(static)
  for (int n = 0; n < nt; ++n) values[n] = extremal(grid, adj.phi[n], gamma, dofs);
  return ControlTrajectory(adj.dt * nt, std::move(values));
}

namespace serial {
ControlTrajectory lmo(const Grid& grid, const AdjointTrajectory& adj, double gamma) {
  const int nt = adj.nt();
  const auto dofs = omega_dofs(grid);
  std::vector<VectorAtomicMeasure> values(static_cast<std::size_t>(nt));
  for (int n = 0; n < nt; ++n) values[n] = extremal(grid, adj.phi[n], gamma, dofs);
  return ControlTrajectory(adj.dt * nt, std::move(values));
}
}  // namespace serial

double pairing(const EvalRecord& record, const ControlTrajectory& v) { return directional_derivative(record, v); }

double fw_gap(const EvalRecord& record, const ControlTrajectory& u, const ControlTrajectory& lmo_result) {
  return std::max(0.0, pairing(record, u) - pairing(record, lmo_result));
}

namespace {

std::size_t max_atoms(const ControlTrajectory& u, Component c) { return u.max_atoms(c); }

ControlTrajectory convex_step(const ControlTrajectory& u, const ControlTrajectory& v, double s, double prune_tol) {
  if (s == 1.0) return v;
  return axpy(s, v, scaled(u, 1.0 - s), prune_tol);
}

}  // namespace

OptimizeResult optimize(std::shared_ptr<const Grid> grid, const SolverParams& params, const ProblemData& data,
                        const ControlTrajectory& u0, const CgmConfig& cfg, const IterateCallback& on_iterate) {
  cfg.validate();
  if (u0.nt() != params.nt) throw std::invalid_argument("optimize: initial control has wrong number of steps");
  if (!u0.feasible(cfg.gamma)) {
    std::ostringstream os;
    os << "optimize: initial control is infeasible (max tv " << u0.max_tv_norm() << " > gamma " << cfg.gamma << ")";
    throw std::invalid_argument(os.str());
  }
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  OptimizeResult out{u0, {}, eval_J(grid, params, data, u0)};
  for (int k = 0;; ++k) {
    EvalRecord& rec = out.record;
    const ControlTrajectory v = lmo(*grid, rec.adjoint, cfg.gamma);
    const double gap = fw_gap(rec, out.control, v);
    IterateEntry entry{k, rec.j_value, gap, 0.0, max_atoms(out.control, Component::x),
                       max_atoms(out.control, Component::y), 0.0};
    if (on_iterate) on_iterate(k, out.control);
    if (gap <= cfg.stop_tol * (1.0 + std::abs(rec.j_value))) {
      entry.seconds = elapsed();
      out.log.entries.push_back(entry);
      out.log.converged = true;
      out.log.stop_reason = "gap";
      break;
    }
    if (k == cfg.max_iter) {
      entry.seconds = elapsed();
      out.log.entries.push_back(entry);
      out.log.stop_reason = "max_iter";
      break;
    }

    double s = 0.0;
    ControlTrajectory next;
    StateTrajectory next_state;
    if (cfg.step_rule == StepRule::harmonic) {
      s = 2.0 / (k + 2.0);
      next = convex_step(out.control, v, s, cfg.prune_tol);
      next_state = solve_state(*grid, params, data.y0, data.f0, next);
    } else {
      // J(u + s d) <= J(u) + c s J'(u) d with J'(u) d = -gap.
      for (double trial = 1.0; trial >= cfg.min_step; trial *= cfg.armijo_shrink) {
        ControlTrajectory cand = convex_step(out.control, v, trial, cfg.prune_tol);
        StateTrajectory st = solve_state(*grid, params, data.y0, data.f0, cand);
        const double j = tracking_value(*grid, params, st, data.y_d);
        if (j <= rec.j_value - cfg.armijo_c * trial * gap) {
          s = trial;
          next = std::move(cand);
          next_state = std::move(st);
          break;
        }
      }
    }
    entry.step = s;
    entry.seconds = elapsed();
    out.log.entries.push_back(entry);
    if (s == 0.0) {
      out.log.stop_reason = "line_search";
      break;
    }
    out.control = std::move(next);
    out.record = eval_J(grid, params, data, out.control, std::move(next_state));
  }
  return out;
}

}  // namespace nsmc
