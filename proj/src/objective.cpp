#include "nsmc/objective.hpp"

#include "nsmc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsmc {

double tracking_value(const Grid& grid, const SolverParams& params, const StateTrajectory& state,
                      const std::vector<VelocityField>& y_d) {
  const int nt = state.nt();
  if (static_cast<int>(y_d.size()) != nt + 1) throw std::invalid_argument("tracking_value: y_d length mismatch");
  double s = 0.0;
  for (int n = 0; n <= nt; ++n) {
    const VelocityField y = grid.from_dofs(state.y[n]);
    double e = 0.0;
    for (Component c : kComponents) {
      const Array2D& a = y[c];
      const Array2D& b = y_d[n][c];
      for (int j = 0; j < a.nj(); ++j) {
        for (int i = 0; i < a.ni(); ++i) {
          const double d = a(i, j) - b(i, j);
          e += grid.face_weight(c, i, j) * d * d;
        }
      }
    }
    s += trapezoid_weight(n, nt) * e;
  }
  return 0.5 * params.dt() * s;
}

double eval_J_value(const Grid& grid, const SolverParams& params, const ProblemData& data, const ControlTrajectory& u) {
  const StateTrajectory st = solve_state(grid, params, data.y0, data.f0, u);
  return tracking_value(grid, params, st, data.y_d);
}

EvalRecord eval_J(std::shared_ptr<const Grid> grid, const SolverParams& params, const ProblemData& data,
                  const ControlTrajectory& u) {
  StateTrajectory st = solve_state(*grid, params, data.y0, data.f0, u);
  return eval_J(std::move(grid), params, data, u, std::move(st));
}

EvalRecord eval_J(std::shared_ptr<const Grid> grid, const SolverParams& params, const ProblemData& data,
                  const ControlTrajectory& u, StateTrajectory state) {
  EvalRecord r;
  r.grid = std::move(grid);
  r.params = params;
  r.data = &data;
  r.control = u;
  r.state = std::move(state);
  r.j_value = tracking_value(*r.grid, params, r.state, data.y_d);
  r.adjoint = solve_adjoint(*r.grid, params, r.state, data.y_d);
  return r;
}

double EvalRecord::grad_pairing(const ControlTrajectory& v) const { return directional_derivative(*this, v); }

double directional_derivative(const EvalRecord& record, const ControlTrajectory& v) {
  if (v.nt() != record.params.nt) throw std::invalid_argument("directional_derivative: wrong number of steps");
  double s = 0.0;
  for (int n = 0; n < v.nt(); ++n) s += control_pairing(*record.grid, v[n], record.adjoint.phi[n]);
  return record.params.dt() * s;
}

double curvature_form(const EvalRecord& record, const StateTrajectory& z) {
  const Grid& grid = *record.grid;
  const int nt = record.params.nt;
  const double dt = record.params.dt();
  double quad = 0.0;
  for (int n = 0; n <= nt; ++n) quad += trapezoid_weight(n, nt) * z.y[n].squaredNorm();
  double cross = 0.0;
  Vec k(grid.n_dofs());
  for (int n = 0; n < nt; ++n) {
    kernels::convect(grid.convection(), z.y[n + 1], record.adjoint.phi[n], k);
    cross += k.dot(z.y[n + 1]);
  }
  return grid.cell_area() * dt * (quad + kCurvatureCrossSign * 2.0 * cross);
}

double curvature_form(const EvalRecord& record, const ControlTrajectory& v) {
  const StateTrajectory z = solve_linearized(*record.grid, record.params, record.state, v);
  return curvature_form(record, z);
}

double curvature_second_order(const EvalRecord& record, const ControlTrajectory& v) {
  const Grid& grid = *record.grid;
  const int nt = record.params.nt;
  const StateTrajectory z = solve_linearized(grid, record.params, record.state, v);
  const StateTrajectory zz = solve_second(grid, record.params, record.state, z, z);
  double s = 0.0;
  for (int n = 0; n <= nt; ++n) {
    const Vec diff = record.state.y[n] - grid.to_dofs(record.data->y_d[n]);
    s += trapezoid_weight(n, nt) * (z.y[n].squaredNorm() + diff.dot(zz.y[n]));
  }
  return grid.cell_area() * record.params.dt() * s;
}

double lagrangian_derivative(const EvalRecord& record, const ControlTrajectory& u, const ControlTrajectory& v) {
  const Grid& grid = *record.grid;
  double s = 0.0;
  for (int n = 0; n < v.nt(); ++n) {
    VectorAtomicMeasure singular;
    for (Component c : kComponents) singular[c] = lebesgue_decompose(v[n][c], u[n][c]).singular;
    s += control_pairing(grid, singular, record.adjoint.phi[n]);
    for (Component c : kComponents) s += record.adjoint.psi[n][index_of(c)] * singular[c].total_variation();
  }
  return record.params.dt() * s;
}

double lagrangian_derivative_full(const EvalRecord& record, const ControlTrajectory& u, const ControlTrajectory& v) {
  double s = 0.0;
  for (int n = 0; n < v.nt(); ++n) {
    for (Component c : kComponents) s += record.adjoint.psi[n][index_of(c)] * j_directional(u[n][c], v[n][c]);
  }
  return directional_derivative(record, v) + record.params.dt() * s;
}

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

FdCheck finite_difference_check(const EvalRecord& record, const ControlTrajectory& v, const std::vector<double>& eps) {
  FdCheck out;
  if (v.is_zero()) {
    out.skipped = true;
    return out;
  }
  const Grid& grid = *record.grid;
  out.derivative = directional_derivative(record, v);
  out.curvature = curvature_form(record, v);
  out.curvature_second = curvature_second_order(record, v);
  out.route_rel_err = relative_error(out.curvature, out.curvature_second);
  out.min_gradient_err = out.min_curvature_err = std::numeric_limits<double>::infinity();
  for (double e : eps) {
    const double jp = eval_J_value(grid, record.params, *record.data, axpy(e, v, record.control, 0.0));
    const double jm = eval_J_value(grid, record.params, *record.data, axpy(-e, v, record.control, 0.0));
    const double g = (jp - jm) / (2.0 * e);
    const double h = (jp - 2.0 * record.j_value + jm) / (e * e);
    out.gradient.push_back({e, g, relative_error(g, out.derivative)});
    out.hessian.push_back({e, h, relative_error(h, out.curvature)});
    out.min_gradient_err = std::min(out.min_gradient_err, out.gradient.back().rel_err);
    out.min_curvature_err = std::min(out.min_curvature_err, out.hessian.back().rel_err);
  }
  return out;
}

}  // namespace nsmc
