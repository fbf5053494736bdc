#include "krylov.hpp"

#include <cmath>
#include <vector>

namespace nsmc::detail {

GmresResult gmres(const LinearMap& apply, const LinearMap& precondition, const Eigen::VectorXd& b,
                  Eigen::VectorXd& x, double rtol, int restart, int max_iterations) {
  using Eigen::VectorXd;
  const Eigen::Index n = b.size();
  if (x.size() != n) x = VectorXd::Zero(n);

  VectorXd work(n);
  VectorXd pb(n);
  precondition(b, pb);
  const double pb_norm = pb.norm();
  GmresResult result;
  if (pb_norm == 0.0) {
    x.setZero();
    result.converged = true;
    return result;
  }

  std::vector<VectorXd> basis(static_cast<std::size_t>(restart) + 1, VectorXd(n));
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(restart + 1, restart);
  VectorXd cs(restart), sn(restart), g(restart + 1);

  int total = 0;
  while (true) {
    // r = M^{-1}(b - A x)
    apply(x, work);
    work = b - work;
    VectorXd r(n);
    precondition(work, r);
    double beta = r.norm();
    result.rel_residual = beta / pb_norm;
    if (result.rel_residual <= rtol) {
      result.converged = true;
      break;
    }
    if (total >= max_iterations) break;

    basis[0] = r / beta;
    g.setZero();
    g[0] = beta;
    int k = 0;
    for (; k < restart && total < max_iterations; ++k, ++total) {
      apply(basis[k], work);
      precondition(work, basis[k + 1]);
      for (int i = 0; i <= k; ++i) {
        hess(i, k) = basis[i].dot(basis[k + 1]);
        basis[k + 1] -= hess(i, k) * basis[i];
      }
      hess(k + 1, k) = basis[k + 1].norm();
      if (hess(k + 1, k) != 0.0) basis[k + 1] /= hess(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * hess(i, k) + sn[i] * hess(i + 1, k);
        hess(i + 1, k) = -sn[i] * hess(i, k) + cs[i] * hess(i + 1, k);
        hess(i, k) = t;
      }
      const double rho = std::hypot(hess(k, k), hess(k + 1, k));
      cs[k] = hess(k, k) / rho;
      sn[k] = hess(k + 1, k) / rho;
      hess(k, k) = rho;
      hess(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) / pb_norm <= rtol) {
        ++k;
        ++total;
        break;
      }
    }
    // Back substitution for the k-dimensional least-squares problem.
    VectorXd coef(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= hess(i, j) * coef[j];
      coef[i] = s / hess(i, i);
    }
    for (int i = 0; i < k; ++i) x += coef[i] * basis[i];
    result.iterations = total;
  }
  result.iterations = total;
  return result;
}

}  // namespace nsmc::detail
