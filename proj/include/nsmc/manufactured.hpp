#pragma once

/// @file manufactured.hpp
/// @brief Manufactured solutions for convergence studies.
///
/// Streamfunction psi = A g(t) s(x) s(y) with s(r) = sin^2(pi r) on the unit
/// square; velocity (psi_y, -psi_x), zero pressure, forcing y_t - nu Lap y + (y.grad)y.

#include "nsmc/ns_forward.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nsmc {

struct ManufacturedCase {
  VelocityField y0;
  FieldSeries f0;          ///< nt dof forcings, step n uses time t_{n+1}
  std::vector<Vec> exact;  ///< nt+1 reference dof vectors
};

/// Continuous solution sampled at face nodes, g(t) = 1 + t. Implicit Euler is
/// exact in time for it, so the error measures the spatial discretization.
ManufacturedCase manufactured_spatial(const Grid& grid, const SolverParams& params, double amplitude);

/// Discrete field g(t) C psi(corners) with g(t) = cos(pi t), forced with the
/// discrete operators: the error is purely temporal.
ManufacturedCase manufactured_temporal(const Grid& grid, const SolverParams& params, double amplitude);

/// sqrt(sum_n theta_n dt |y^n - exact^n|^2) with face quadrature.
double l2q_error(const Grid& grid, double dt, const std::vector<Vec>& y, const std::vector<Vec>& exact);

struct ConvergenceRow {
  std::string study;  ///< "space" or "time"
  int n = 0;          ///< nx (= ny) or nt
  double h = 0.0;     ///< mesh width or time step
  double error = 0.0;
  std::optional<double> order;  ///< log2 ratio against the previous row
};

/// Spatial study on nx = ny in `sizes` (with nt_space steps), temporal study on
/// `steps` (on an nx_time grid). Uses params for nu, T and the tolerances.
std::vector<ConvergenceRow> manufactured_convergence(const SolverParams& params, double amplitude,
                                                     const std::vector<int>& sizes, int nt_space,
                                                     const std::vector<int>& steps, int nx_time);

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

}  // namespace nsmc
