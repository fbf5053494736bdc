#pragma once

/// @file optimizer.hpp
/// @brief Conditional gradient method over the admissible set, with the
/// Dirac-extremal linear minimization oracle.

#include "nsmc/objective.hpp"

#include <functional>
#include <vector>

namespace nsmc {

enum class StepRule { armijo, harmonic };

struct CgmConfig {
  double gamma = 1.0;
  int max_iter = 200;
  StepRule step_rule = StepRule::armijo;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  double min_step = 1e-12;
  double stop_tol = 1e-10;
  double prune_tol = 1e-12;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct IterateEntry {
  int iter = 0;
  double J = 0.0;
  double gap = 0.0;
  double step = 0.0;       ///< step taken after this iterate (0 on the final row)
  std::size_t atoms_c1 = 0;  ///< max atoms of component 1 over the time steps
  std::size_t atoms_c2 = 0;
  double seconds = 0.0;    ///< wall time since start
};

struct IterateLog {
  std::vector<IterateEntry> entries;
  bool converged = false;
  std::string stop_reason;
};

/// Per step and component: one atom of weight -gamma*sign(phi) at the first
/// omega node maximizing |phi_i(t_n)|, nothing where phi_i vanishes on omega.
/// Time steps are scanned in parallel.
ControlTrajectory lmo(const Grid& grid, const AdjointTrajectory& adj, double gamma);

namespace serial {
ControlTrajectory lmo(const Grid& grid, const AdjointTrajectory& adj, double gamma);
}

/// sum_n dt <v(t_n), phi(t_n)>.
double pairing(const EvalRecord& record, const ControlTrajectory& v);

/// <J'(u), u - v*>, clamped at zero.
double fw_gap(const EvalRecord& record, const ControlTrajectory& u, const ControlTrajectory& lmo_result);

struct OptimizeResult {
  ControlTrajectory control;
  IterateLog log;
  EvalRecord record;  ///< evaluation at the returned control
};

/// Called after every iterate with (iteration, control).
using IterateCallback = std::function<void(int, const ControlTrajectory&)>;

/// Throws std::invalid_argument for an infeasible u0.
OptimizeResult optimize(std::shared_ptr<const Grid> grid, const SolverParams& params, const ProblemData& data,
                        const ControlTrajectory& u0, const CgmConfig& cfg, const IterateCallback& on_iterate = {});

}  // namespace nsmc
