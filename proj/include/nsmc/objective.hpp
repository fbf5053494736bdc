#pragma once

/// @file objective.hpp
/// @brief Tracking functional, its derivative pairing, curvature and the
/// Lagrangian derivative.

#include "nsmc/adjoint.hpp"
#include "nsmc/linearized.hpp"

#include <memory>
#include <vector>

namespace nsmc {

struct ProblemData {
  VelocityField y0;
  FieldSeries f0;                      ///< nt dof forcings or empty
  std::vector<VelocityField> y_d;      ///< nt+1 target snapshots
};

/// Sign of the cross term in the closed-form curvature,
///   J''(u)v^2 = |z_v|^2 + kCurvatureCrossSign * 2 (z_v . grad) phi . z_v,
/// fixed against the finite-difference second derivative.
inline constexpr double kCurvatureCrossSign = 1.0;

struct EvalRecord {
  std::shared_ptr<const Grid> grid;
  SolverParams params;
  const ProblemData* data = nullptr;
  ControlTrajectory control;
  double j_value = 0.0;
  StateTrajectory state;
  AdjointTrajectory adjoint;

  /// J'(u) v, the derivative pairing against the cached adjoint.
  double grad_pairing(const ControlTrajectory& v) const;
};

/// 0.5 * sum_n theta_n dt |y^n - y_d^n|^2 with face quadrature.
double tracking_value(const Grid& grid, const SolverParams& params, const StateTrajectory& state,
                      const std::vector<VelocityField>& y_d);

/// Forward solve only; used by line searches.
double eval_J_value(const Grid& grid, const SolverParams& params, const ProblemData& data, const ControlTrajectory& u);

/// Forward and adjoint solves. `data` must outlive the record.
EvalRecord eval_J(std::shared_ptr<const Grid> grid, const SolverParams& params, const ProblemData& data,
                  const ControlTrajectory& u);

/// Completes a record from an already computed state (adjoint solve only).
EvalRecord eval_J(std::shared_ptr<const Grid> grid, const SolverParams& params, const ProblemData& data,
                  const ControlTrajectory& u, StateTrajectory state);

/// sum_n dt sum_i sum_atoms w * phi_i(x, t_n).
double directional_derivative(const EvalRecord& record, const ControlTrajectory& v);

/// Closed-form curvature: sum_n theta dt |z^n|^2 + 2 sum_n dt <N(z^{n+1}; phi^n), z^{n+1}>.
double curvature_form(const EvalRecord& record, const ControlTrajectory& v);
/// Same value assembled from the linearized trajectory z of v.
double curvature_form(const EvalRecord& record, const StateTrajectory& z);

/// Curvature through the second-order system: sum theta dt (|z|^2 + <y - y_d, z_vv>).
double curvature_second_order(const EvalRecord& record, const ControlTrajectory& v);

/// sum_i sum_n dt [<v_is, phi_i> + psi_i * |v_is|] with v_is the part of
/// v_i(t_n) singular with respect to u_i(t_n).
double lagrangian_derivative(const EvalRecord& record, const ControlTrajectory& u, const ControlTrajectory& v);

/// Unreduced form J'(u)v + sum_i sum_n dt psi_i j'(u_i; v_i). Equals the
/// reduced form when u satisfies the support condition exactly.
double lagrangian_derivative_full(const EvalRecord& record, const ControlTrajectory& u, const ControlTrajectory& v);

struct FdRow {
  double eps = 0.0;
  double fd = 0.0;
  double rel_err = 0.0;
};

struct FdCheck {
  bool skipped = false;     ///< v = 0
  double derivative = 0.0;  ///< J'(u)v
  double curvature = 0.0;   ///< closed form
  double curvature_second = 0.0;  ///< second-order system route
  std::vector<FdRow> gradient;    ///< central differences of J
  std::vector<FdRow> hessian;     ///< second differences of J
  double min_gradient_err = 0.0;
  double min_curvature_err = 0.0;
  double route_rel_err = 0.0;  ///< |curvature - curvature_second| / |curvature|
};

/// Finite-difference sweep of J'(u)v and J''(u)v^2 at the record's control.
FdCheck finite_difference_check(const EvalRecord& record, const ControlTrajectory& v, const std::vector<double>& eps);

/// |a - b| / max(|a|, |b|), zero when both vanish.
double relative_error(double a, double b);

}  // namespace nsmc
