#pragma once

/// @file ns_forward.hpp
/// @brief Implicit Euler time stepping of the controlled Navier-Stokes system
/// on the MAC grid with measure-valued forcing.

#include "nsmc/grid.hpp"
#include "nsmc/measures.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsmc {

struct SolverParams {
  double nu = 0.05;
  double T = 1.0;
  int nt = 64;
  int picard_max = 60;
  double picard_tol = 1e-12;
  double eps_div = 1e-10;
  /// Tolerance of the inner linear solves relative to the right-hand side.
  double linear_tol = 1e-14;
  std::optional<double> doc_p;  ///< documentation only
  std::optional<double> doc_q;  ///< documentation only

  double dt() const { return T / nt; }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Grid fields indexed by time step, stored as dof vectors.
using FieldSeries = std::vector<Vec>;

struct StateTrajectory {
  double dt = 0.0;
  std::vector<Vec> y;               ///< nt+1 velocity dof vectors
  std::vector<PressureField> p;     ///< nt+1 zero-mean pressures
  std::vector<int> picard_sweeps;   ///< nt entries (zero for linear solves)
  std::vector<double> residuals;    ///< nt final relative residuals

  int nt() const { return static_cast<int>(y.size()) - 1; }
  VelocityField velocity(const Grid& grid, int n) const { return grid.from_dofs(y[n]); }
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int step, double residual)
      : std::runtime_error(what), step_(step), residual_(residual) {}
  int step() const { return step_; }
  double residual() const { return residual_; }

 private:
  int step_;
  double residual_;
};

/// Dof forcing of one control value: sum of spread_atom over all atoms.
/// Throws std::domain_error for atoms outside omega.
Vec control_forcing(const Grid& grid, const VectorAtomicMeasure& m);

/// sum over atoms (x, w) of component i: w * field_i(x), for a dof field.
double control_pairing(const Grid& grid, const VectorAtomicMeasure& m, const Vec& field);

/// Solves the state equation. y0 is projected when its divergence exceeds
/// eps_div. f0 holds nt dof forcings (step n -> n+1 uses f0[n]) or is empty.
StateTrajectory solve_state(const Grid& grid, const SolverParams& params, const VelocityField& y0,
                            const FieldSeries& f0, const ControlTrajectory& u);

/// 0.5 * |y(t_n)|^2 per snapshot.
std::vector<double> kinetic_energy_trace(const Grid& grid, const StateTrajectory& traj);

}  // namespace nsmc
