#pragma once

#include <Eigen/Dense>

#include <functional>

namespace nsmc::detail {

struct GmresResult {
  int iterations = 0;
  double rel_residual = 0.0;  ///< preconditioned residual relative to |M^{-1} b|
  bool converged = false;
};

using LinearMap = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Left-preconditioned restarted GMRES with modified Gram-Schmidt.
/// `x` holds the initial guess on entry. All arithmetic is scale-equivariant:
/// gmres(2b) returns exactly 2*gmres(b) when started from zero.
GmresResult gmres(const LinearMap& apply, const LinearMap& precondition, const Eigen::VectorXd& b,
                  Eigen::VectorXd& x, double rtol, int restart, int max_iterations);

}  // namespace nsmc::detail
