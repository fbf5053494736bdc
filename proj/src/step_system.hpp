#pragma once

#include "krylov.hpp"
#include "nsmc/grid.hpp"

#include <Eigen/SparseCholesky>

namespace nsmc::detail {

/// Per-step linear algebra of the implicit Euler scheme restricted to the
/// divergence-free subspace y = C psi. Systems have the form
///   C^T (I/dt + nu*A + K) C psi = C^T rhs
/// with K a convection-type operator supplied by the caller. They are solved by
/// GMRES preconditioned with the Cholesky factor of the Stokes part
/// C^T (I/dt + nu*A) C, factored once per (grid, nu, dt).
class StepSystem {
 public:
  StepSystem(const Grid& grid, double nu, double dt);

  const Grid& grid() const { return grid_; }
  double dt() const { return dt_; }
  double nu() const { return nu_; }

  /// out = y/dt + nu*A*y
  void apply_stokes(const Vec& y, Vec& out) const;

  /// Solves the reduced system; `psi` is the initial guess and the solution on
  /// return. Returns the velocity C psi.
  Vec solve(const LinearMap& convection, const Vec& rhs, Vec& psi, double rtol, GmresResult* info = nullptr) const;

  Vec velocity(const Vec& psi) const { return curl_ * psi; }
  Vec restrict(const Vec& y) const { return curl_t_ * y; }
  int n_reduced() const { return static_cast<int>(curl_.cols()); }

 private:
  const Grid& grid_;
  double nu_;
  double dt_;
  SpMat curl_;
  SpMat curl_t_;
  SpMat stokes_;
  Eigen::SimplicialLLT<SpMat> stokes_factor_;
};

}  // namespace nsmc::detail
