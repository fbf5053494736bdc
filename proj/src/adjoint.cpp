#include "nsmc/adjoint.hpp"

#include "nsmc/kernels.hpp"
#include "step_system.hpp"

#include <string>

namespace nsmc {

namespace {

std::vector<int> omega_dofs(const Grid& grid, Component c) {
  std::vector<int> out;
  for (const OmegaNode& node : grid.omega_nodes(c)) out.push_back(node.dof);
  return out;
}

}  // namespace

SupNorm sup_norm_on_omega(const Grid& grid, const Vec& field, Component c) {
  const std::vector<int> dofs = omega_dofs(grid, c);
  const kernels::ArgMax m = kernels::abs_argmax({field.data(), static_cast<std::size_t>(field.size())}, dofs);
  return {m.value, grid.omega_nodes(c)[m.position]};
}

SupNorm sup_norm_on_omega(const Grid& grid, const AdjointTrajectory& adj, int n, Component c) {
  const int k = index_of(c);
  return {adj.psi[n][k], grid.omega_nodes(c)[adj.argmax[n][k]]};
}

AdjointTrajectory solve_adjoint(const Grid& grid, const SolverParams& params, const StateTrajectory& base,
                                const std::vector<VelocityField>& y_d) {
  params.validate();
  const int nt = params.nt;
  if (base.nt() != nt) throw std::invalid_argument("solve_adjoint: base trajectory has wrong length");
  if (static_cast<int>(y_d.size()) != nt + 1) {
    throw std::invalid_argument("solve_adjoint: y_d must hold nt+1 snapshots");
  }
  const double dt = params.dt();
  const detail::StepSystem sys(grid, params.nu, dt);
  const ConvectionTensor& tensor = grid.convection();
  const int n = grid.n_dofs();

  AdjointTrajectory adj;
  adj.dt = dt;
  adj.phi.assign(nt + 1, Vec::Zero(n));
  adj.pi.assign(nt + 1, grid.zero_pressure());
  Vec psi = Vec::Zero(sys.n_reduced());
  Vec e(n), k(n);
  detail::GmresResult info;
  for (int m = nt; m >= 1; --m) {
    const Vec& ybar = base.y[m];
    const Vec b = trapezoid_weight(m, nt) * (base.y[m] - grid.to_dofs(y_d[m])) + adj.phi[m] / dt;
    const detail::LinearMap jac_t = [&](const Vec& v, Vec& o) {
      kernels::convect_jacobian_transpose(tensor, ybar, v, o);
    };
    Vec phi = sys.solve(jac_t, b, psi, params.linear_tol, &info);
    if (!phi.allFinite()) throw SolverError("non-finite adjoint at step " + std::to_string(m - 1), m - 1, 0.0);
    sys.apply_stokes(phi, e);
    kernels::convect_jacobian_transpose(tensor, ybar, phi, k);
    adj.pi[m - 1] = grid.pressure_from_residual(b - e - k);
    adj.phi[m - 1] = std::move(phi);
  }

  const std::vector<int> dofs1 = omega_dofs(grid, Component::x);
  const std::vector<int> dofs2 = omega_dofs(grid, Component::y);
  adj.psi.resize(nt + 1);
  adj.argmax.resize(nt + 1);
  for (int m = 0; m <= nt; ++m) {
    const std::span<const double> values(adj.phi[m].data(), static_cast<std::size_t>(n));
    const kernels::ArgMax a1 = kernels::abs_argmax(values, dofs1);
    const kernels::ArgMax a2 = kernels::abs_argmax(values, dofs2);
    adj.psi[m] = {a1.value, a2.value};
    adj.argmax[m] = {a1.position, a2.position};
  }
  return adj;
}

}  // namespace nsmc
