#include "nsmc/ns_forward.hpp"

#include "nsmc/kernels.hpp"
#include "step_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nsmc {

void SolverParams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("solver params: " + msg); };
  if (!(nu > 0.0)) fail("nu must be positive");
  if (!(T > 0.0)) fail("T must be positive");
  if (nt < 2) fail("nt must be at least 2");
  if (picard_max < 1) fail("picard_max must be at least 1");
  if (!(picard_tol > 0.0)) fail("picard_tol must be positive");
  if (!(eps_div > 0.0)) fail("eps_div must be positive");
  if (!(linear_tol > 0.0 && linear_tol < 1.0)) fail("linear_tol must lie in (0, 1)");
  if (doc_p && !(*doc_p >= 4.0 / 3.0 && *doc_p < 2.0)) fail("doc_p must satisfy 4/3 <= p < 2");
  if (doc_q) {
    if (!doc_p) fail("doc_q given without doc_p");
    if (!(*doc_q > 2.0 * *doc_p / (*doc_p - 1.0))) fail("doc_q must exceed 2p/(p-1)");
  }
}

Vec control_forcing(const Grid& grid, const VectorAtomicMeasure& m) {
  Vec f = Vec::Zero(grid.n_dofs());
  const double inv_area = 1.0 / grid.cell_area();
  for (Component c : kComponents) {
    for (const Atom& a : m[c].atoms()) {
      if (!grid.omega().contains(a.position)) {
        std::ostringstream os;
        os << "control atom at (" << a.position.x << ", " << a.position.y << ") lies outside omega";
        throw std::domain_error(os.str());
      }
      const double density = a.weight * inv_area;
      for (const StencilEntry& e : grid.stencil(a.position, c)) {
        const int k = grid.dof(c, e.i, e.j);
        if (k >= 0) f[k] += density * e.weight;
      }
    }
  }
  return f;
}

double control_pairing(const Grid& grid, const VectorAtomicMeasure& m, const Vec& field) {
  double s = 0.0;
  for (Component c : kComponents) {
    for (const Atom& a : m[c].atoms()) {
      double v = 0.0;
      for (const StencilEntry& e : grid.stencil(a.position, c)) {
        const int k = grid.dof(c, e.i, e.j);
        if (k >= 0) v += e.weight * field[k];
      }
      s += a.weight * v;
    }
  }
  return s;
}

namespace {

void check_inputs(const Grid& grid, const SolverParams& params, const FieldSeries& f0, const ControlTrajectory& u) {
  params.validate();
  if (u.nt() != params.nt) {
    throw std::invalid_argument("solve_state: control has " + std::to_string(u.nt()) + " steps, params.nt = " +
                                std::to_string(params.nt));
  }
  if (!f0.empty() && static_cast<int>(f0.size()) != params.nt) {
    throw std::invalid_argument("solve_state: f0 must hold nt forcing fields or be empty");
  }
  for (const Vec& f : f0) {
    if (f.size() != grid.n_dofs()) throw std::invalid_argument("solve_state: f0 field size mismatch");
  }
}

}  // namespace

StateTrajectory solve_state(const Grid& grid, const SolverParams& params, const VelocityField& y0,
                            const FieldSeries& f0, const ControlTrajectory& u) {
  check_inputs(grid, params, f0, u);
  const int nt = params.nt;
  const double dt = params.dt();
  const detail::StepSystem sys(grid, params.nu, dt);
  const ConvectionTensor& tensor = grid.convection();

  StateTrajectory out;
  out.dt = dt;
  out.y.reserve(nt + 1);
  out.p.reserve(nt + 1);
  {
    const VelocityField start = grid.max_abs_divergence(y0) > params.eps_div ? grid.project(y0) : y0;
    out.y.push_back(grid.to_dofs(start));
    out.p.push_back(grid.zero_pressure());
  }

  const int n = grid.n_dofs();
  Vec psi = Vec::Zero(sys.n_reduced());
  Vec ey(n), ky(n), res(n);
  Vec w;
  for (int step = 0; step < nt; ++step) {
    Vec b = out.y[step] / dt;
    if (!f0.empty()) b += f0[step];
    b += control_forcing(grid, u[step]);
    const double bnorm = sys.restrict(b).norm();

    Vec y = out.y[step];
    double rel = 1.0;
    int sweeps = 0;
    auto residual = [&](const Vec& v) {
      sys.apply_stokes(v, ey);
      kernels::convect(tensor, v, v, ky);
      res = b - ey - ky;
      return sys.restrict(res).norm() / bnorm;
    };
    if (bnorm == 0.0) {
      y.setZero();
      psi.setZero();
      res.setZero();
      rel = 0.0;
    } else {
      rel = residual(y);
      while (rel > params.picard_tol) {
        if (sweeps == params.picard_max) {
          std::ostringstream os;
          os << "Picard iteration did not converge at step " << step << " (residual " << rel << ")";
          throw SolverError(os.str(), step, rel);
        }
        w = y;
        const detail::LinearMap conv = [&](const Vec& v, Vec& o) { kernels::convect(tensor, w, v, o); };
        const double rtol = std::clamp(1e-2 * rel, params.linear_tol, 1e-6);
        y = sys.solve(conv, b, psi, rtol);
        ++sweeps;
        rel = residual(y);
        if (!std::isfinite(rel)) {
          throw SolverError("non-finite state at step " + std::to_string(step), step, rel);
        }
      }
    }
    out.p.push_back(grid.pressure_from_residual(res));
    out.y.push_back(std::move(y));
    out.picard_sweeps.push_back(sweeps);
    out.residuals.push_back(rel);
  }
  return out;
}

std::vector<double> kinetic_energy_trace(const Grid& grid, const StateTrajectory& traj) {
  std::vector<double> e;
  e.reserve(traj.y.size());
  for (const Vec& y : traj.y) e.push_back(0.5 * grid.cell_area() * y.squaredNorm());
  return e;
}

}  // namespace nsmc
