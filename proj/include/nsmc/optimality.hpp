#pragma once

/// @file optimality.hpp
/// @brief Numerical audit of first-order structure, critical cones, the
/// second-order necessary condition and quadratic growth.

#include "nsmc/objective.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace nsmc {

struct StepResidual {
  int n = 0;
  Component component = Component::x;
  double psi = 0.0;
  double tv = 0.0;
  bool active = false;            ///< psi > tol_psi
  double norm_gap = 0.0;          ///< |tv - gamma| when active, else 0
  double support_residual = 0.0;  ///< max over atoms of |phi(x) + sign(w) psi|
};

struct OptimalityReport {
  double gamma = 0.0;
  double max_psi = 0.0;
  double tol_psi = 0.0;  ///< 1e-10 * max_psi
  std::vector<StepResidual> steps;
  double max_norm_gap = 0.0;
  double max_support_residual = 0.0;
};

/// Relative threshold below which psi is treated as zero.
inline constexpr double kPsiRelTol = 1e-10;

OptimalityReport check_first_order(const Grid& grid, const ControlTrajectory& u, const AdjointTrajectory& adj,
                                   double gamma);

struct ConeOptions {
  double tau = 1e-2;
  double gamma = 1.0;
  /// Slack for the equalities, relative to the size of v (and psi).
  double tol = 1e-9;
};

struct ConeMembership {
  bool in_C = false;
  bool in_C_tau = false;
  double z_norm = 0.0;            ///< |z_v| in L2(Q)
  double lagrangian = 0.0;        ///< reduced Lagrangian derivative
  double weighted_j = 0.0;        ///< sum_i sum_n dt psi_eff j'(u_i; v_i) over active steps
  double max_active_j = 0.0;      ///< largest j' over steps with |u_i| = gamma
  double max_abs_j_psi = 0.0;     ///< largest |j'| over active steps with psi > tol_psi
  double slack_j = 0.0;
  double slack_L = 0.0;
};

/// Membership of v in C_u and C^tau_u at a control u with record `record`.
ConeMembership cone_membership(const EvalRecord& record, const ControlTrajectory& v, const ConeOptions& opts);

struct SecondOrderScan {
  int n_sampled = 0;
  int n_critical = 0;
  std::optional<double> min_curvature;
  std::vector<double> curvatures;  ///< of the critical directions, in sampling order
};

/// Builds n_dirs random candidate critical directions, keeps those in C_u and
/// returns their curvature J''(u)v^2.
SecondOrderScan second_order_necessary_scan(const EvalRecord& record, int n_dirs, std::uint64_t seed,
                                            const ConeOptions& opts);

/// Random critical-direction candidate used by the scan.
ControlTrajectory sample_critical_direction(const EvalRecord& record, std::uint64_t seed, int index,
                                            const ConeOptions& opts);

struct GrowthSample {
  int index = 0;
  double distance = 0.0;    ///< surrogate distance of the perturbation
  double state_dist2 = 0.0; ///< |y_u - y_bar|^2 in L2(Q)
  double dJ = 0.0;          ///< J(u) - J(u_bar)
  double max_tv = 0.0;
};

struct GrowthReport {
  std::uint64_t seed = 0;
  double radius = 0.0;
  int rejected = 0;  ///< infeasible samples (zero by construction)
  std::vector<GrowthSample> samples;
  std::optional<double> kappa;  ///< min of 2 dJ / |dy|^2 over samples with |dy| > 0
};

/// Surrogate distance between two controls: L2(Q) norm of the difference of
/// their spread forcings.
double forcing_distance(const Grid& grid, const ControlTrajectory& a, const ControlTrajectory& b);

/// Random feasible perturbation of u_bar (position and weight jitter, rescaled
/// into the gamma ball and pulled back to `radius`). Depends only on (seed, index).
ControlTrajectory growth_perturbation(const Grid& grid, const ControlTrajectory& u_bar, double gamma, double radius,
                                      std::uint64_t seed, int index);

/// Samples are evaluated in parallel; results do not depend on the thread count.
GrowthReport quadratic_growth_probe(const EvalRecord& record, int n_samples, double radius, double gamma,
                                    std::uint64_t seed);

}  // namespace nsmc
