#include "step_system.hpp"

#include <stdexcept>

namespace nsmc::detail {

namespace {
constexpr int kRestart = 60;
constexpr int kMaxIterations = 600;
}  // namespace

StepSystem::StepSystem(const Grid& grid, double nu, double dt)
    : grid_(grid), nu_(nu), dt_(dt), curl_(grid.curl()), curl_t_(grid.curl().transpose()) {
  SpMat id(grid.n_dofs(), grid.n_dofs());
  id.setIdentity();
  const SpMat helmholtz = (1.0 / dt) * id + nu * grid.neg_laplacian();
  stokes_ = curl_t_ * helmholtz * curl_;
  stokes_factor_.compute(stokes_);
  if (stokes_factor_.info() != Eigen::Success) {
    throw std::runtime_error("StepSystem: Stokes factorization failed");
  }
}

void StepSystem::apply_stokes(const Vec& y, Vec& out) const {
  out.noalias() = nu_ * (grid_.neg_laplacian() * y);
  out += y / dt_;
}

Vec StepSystem::solve(const LinearMap& convection, const Vec& rhs, Vec& psi, double rtol,
                      GmresResult* info) const {
  const Vec b = curl_t_ * rhs;
  Vec y(grid_.n_dofs());
  Vec ey(grid_.n_dofs());
  Vec ky(grid_.n_dofs());
  const LinearMap op = [&](const Vec& p, Vec& out) {
    y.noalias() = curl_ * p;
    apply_stokes(y, ey);
    convection(y, ky);
    ey += ky;
    out.noalias() = curl_t_ * ey;
  };
  const LinearMap prec = [&](const Vec& r, Vec& out) { out = stokes_factor_.solve(r); };
  if (psi.size() != b.size()) psi = Vec::Zero(b.size());
  GmresResult res = gmres(op, prec, b, psi, rtol, kRestart, kMaxIterations);
  if (info) *info = res;
  return curl_ * psi;
}

}  // namespace nsmc::detail
