#pragma once

/// @file adjoint.hpp
/// @brief Backward adjoint of the discrete linearized scheme and the
/// per-step sup norms of the adjoint on the control window.

#include "nsmc/ns_forward.hpp"

#include <array>
#include <vector>

namespace nsmc {

struct AdjointTrajectory {
  double dt = 0.0;
  std::vector<Vec> phi;                           ///< nt+1 dof vectors, phi[nt] = 0
  std::vector<PressureField> pi;                  ///< nt+1 zero-mean pressures
  std::vector<std::array<double, 2>> psi;         ///< max over omega nodes of |phi_i(t_n)|
  std::vector<std::array<int, 2>> argmax;         ///< index into Grid::omega_nodes(i)

  int nt() const { return static_cast<int>(phi.size()) - 1; }
  VelocityField velocity(const Grid& grid, int n) const { return grid.from_dofs(phi[n]); }
};

/// Trapezoid weight of snapshot n in the time quadrature.
inline double trapezoid_weight(int n, int nt) { return (n == 0 || n == nt) ? 0.5 : 1.0; }

/// Marches backward from phi(T) = 0. With this scaling the derivative of the
/// tracking functional is sum_n dt * control_pairing(v[n], phi[n]).
/// y_d holds nt+1 snapshots.
AdjointTrajectory solve_adjoint(const Grid& grid, const SolverParams& params, const StateTrajectory& base,
                                const std::vector<VelocityField>& y_d);

struct SupNorm {
  double value = 0.0;
  OmegaNode node;
};

/// Max of |phi_i(t_n)| over omega nodes; ties go to the first node in
/// lexicographic order, so phi = 0 returns the first omega node.
SupNorm sup_norm_on_omega(const Grid& grid, const AdjointTrajectory& adj, int n, Component c);

/// sup norm of a single dof field over the omega nodes of component c.
SupNorm sup_norm_on_omega(const Grid& grid, const Vec& field, Component c);

}  // namespace nsmc
