#include "nsmc/linearized.hpp"

#include "nsmc/kernels.hpp"
#include "oseen.hpp"

#include <string>

namespace nsmc {

namespace detail {

StateTrajectory march_linearized(const Grid& grid, const SolverParams& params, const StateTrajectory& base,
                                 const std::function<Vec(int)>& forcing) {
  params.validate();
  if (base.nt() != params.nt) throw std::invalid_argument("linearized solve: base trajectory has wrong length");
  const int nt = params.nt;
  const double dt = params.dt();
  const StepSystem sys(grid, params.nu, dt);
  const ConvectionTensor& tensor = grid.convection();
  const int n = grid.n_dofs();

  StateTrajectory out;
  out.dt = dt;
  out.y.assign(1, Vec::Zero(n));
  out.p.assign(1, grid.zero_pressure());
  Vec psi = Vec::Zero(sys.n_reduced());
  Vec ez(n), kz(n);
  GmresResult info;
  for (int step = 0; step < nt; ++step) {
    const Vec& ybar = base.y[step + 1];
    const Vec b = out.y[step] / dt + forcing(step);
    const LinearMap jac = [&](const Vec& v, Vec& o) { kernels::convect_jacobian(tensor, ybar, v, o); };
    Vec z = sys.solve(jac, b, psi, params.linear_tol, &info);
    if (!z.allFinite()) throw SolverError("non-finite linearized state at step " + std::to_string(step), step, 0.0);
    sys.apply_stokes(z, ez);
    kernels::convect_jacobian(tensor, ybar, z, kz);
    out.p.push_back(grid.pressure_from_residual(b - ez - kz));
    out.y.push_back(std::move(z));
    out.picard_sweeps.push_back(0);
    out.residuals.push_back(info.rel_residual);
  }
  return out;
}

}  // namespace detail

StateTrajectory solve_linearized(const Grid& grid, const SolverParams& params, const StateTrajectory& base,
                                 const ControlTrajectory& v) {
  if (v.nt() != params.nt) throw std::invalid_argument("solve_linearized: direction has wrong number of steps");
  return detail::march_linearized(grid, params, base, [&](int step) { return control_forcing(grid, v[step]); });
}

StateTrajectory solve_second(const Grid& grid, const SolverParams& params, const StateTrajectory& base,
                             const StateTrajectory& z1, const StateTrajectory& z2) {
  if (z1.nt() != params.nt || z2.nt() != params.nt) {
    throw std::invalid_argument("solve_second: first-order trajectories have wrong length");
  }
  const ConvectionTensor& tensor = grid.convection();
  return detail::march_linearized(grid, params, base, [&](int step) {
    Vec g(grid.n_dofs());
    kernels::convect_jacobian(tensor, z1.y[step + 1], z2.y[step + 1], g);
    return Vec(-g);
  });
}

}  // namespace nsmc
