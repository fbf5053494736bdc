#include "nsmc/manufactured.hpp"

#include "nsmc/adjoint.hpp"
#include "nsmc/io.hpp"
#include "nsmc/kernels.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace nsmc {

namespace {

constexpr double pi = std::numbers::pi;

struct Profile {
  double s, d1, d2, d3;
};

Profile profile(double r) {
  return {std::sin(pi * r) * std::sin(pi * r), pi * std::sin(2 * pi * r), 2 * pi * pi * std::cos(2 * pi * r),
          -4 * pi * pi * pi * std::sin(2 * pi * r)};
}

// Continuous fields at point (x, y) for amplitude a*g and time derivative a*gt.
std::array<double, 2> velocity(double ag, double x, double y) {
  const Profile px = profile(x), py = profile(y);
  return {ag * px.s * py.d1, -ag * px.d1 * py.s};
}

std::array<double, 2> forcing(double ag, double agt, double nu, double x, double y) {
  const Profile px = profile(x), py = profile(y);
  const double u = ag * px.s * py.d1;
  const double v = -ag * px.d1 * py.s;
  const double ux = ag * px.d1 * py.d1;
  const double uy = ag * px.s * py.d2;
  const double vx = -ag * px.d2 * py.s;
  const double vy = -ag * px.d1 * py.d1;
  const double lap_u = ag * (px.d2 * py.d1 + px.s * py.d3);
  const double lap_v = -ag * (px.d3 * py.s + px.d1 * py.d2);
  return {agt * px.s * py.d1 - nu * lap_u + u * ux + v * uy, -agt * px.d1 * py.s - nu * lap_v + u * vx + v * vy};
}

template <class F>
Vec sample(const Grid& grid, F&& f) {
  VelocityField field = grid.zero_velocity();
  for (Component c : kComponents) {
    Array2D& a = field[c];
    for (int j = 0; j < a.nj(); ++j) {
      for (int i = 0; i < a.ni(); ++i) {
        if (grid.dof(c, i, j) < 0) continue;
        const Point p = grid.node_position(c, i, j);
        a(i, j) = f(p.x, p.y)[index_of(c)];
      }
    }
  }
  return grid.to_dofs(field);
}

void require_unit_square(const Grid& grid) {
  if (grid.spec().lx != 1.0 || grid.spec().ly != 1.0) {
    throw std::invalid_argument("manufactured solution is defined on the unit square");
  }
}

}  // namespace

ManufacturedCase manufactured_spatial(const Grid& grid, const SolverParams& params, double amplitude) {
  require_unit_square(grid);
  const int nt = params.nt;
  const double dt = params.dt();
  ManufacturedCase out;
  // Exact divergence-free start: discrete curl of the corner streamfunction.
  Vec psi(grid.n_corners());
  for (int j = 1; j < grid.ny(); ++j) {
    for (int i = 1; i < grid.nx(); ++i) {
      psi[(i - 1) + (grid.nx() - 1) * (j - 1)] = amplitude * profile(i * grid.hx()).s * profile(j * grid.hy()).s;
    }
  }
  out.y0 = grid.from_dofs(grid.curl() * psi);
  for (int n = 0; n <= nt; ++n) {
    const double g = 1.0 + n * dt;
    out.exact.push_back(sample(grid, [&](double x, double y) { return velocity(amplitude * g, x, y); }));
  }
  for (int n = 0; n < nt; ++n) {
    const double g = 1.0 + (n + 1) * dt;
    out.f0.push_back(sample(grid, [&](double x, double y) { return forcing(amplitude * g, amplitude, params.nu, x, y); }));
  }
  return out;
}

ManufacturedCase manufactured_temporal(const Grid& grid, const SolverParams& params, double amplitude) {
  require_unit_square(grid);
  const int nt = params.nt;
  const double dt = params.dt();
  Vec psi(grid.n_corners());
  for (int j = 1; j < grid.ny(); ++j) {
    for (int i = 1; i < grid.nx(); ++i) {
      psi[(i - 1) + (grid.nx() - 1) * (j - 1)] = amplitude * profile(i * grid.hx()).s * profile(j * grid.hy()).s;
    }
  }
  const Vec Y = grid.curl() * psi;
  const Vec AY = grid.neg_laplacian() * Y;
  Vec NY;
  kernels::convect(grid.convection(), Y, Y, NY);
  auto g = [](double t) { return std::cos(pi * t); };
  auto gt = [](double t) { return -pi * std::sin(pi * t); };

  ManufacturedCase out;
  out.y0 = grid.from_dofs(Y);
  for (int n = 0; n <= nt; ++n) out.exact.push_back(g(n * dt) * Y);
  for (int n = 0; n < nt; ++n) {
    const double t = (n + 1) * dt;
    out.f0.push_back(gt(t) * Y + params.nu * g(t) * AY + g(t) * g(t) * NY);
  }
  return out;
}

double l2q_error(const Grid& grid, double dt, const std::vector<Vec>& y, const std::vector<Vec>& exact) {
  if (y.size() != exact.size()) throw std::invalid_argument("l2q_error: length mismatch");
  const int nt = static_cast<int>(y.size()) - 1;
  double s = 0.0;
  for (int n = 0; n <= nt; ++n) s += trapezoid_weight(n, nt) * (y[n] - exact[n]).squaredNorm();
  return std::sqrt(dt * grid.cell_area() * s);
}

std::vector<ConvergenceRow> manufactured_convergence(const SolverParams& params, double amplitude,
                                                     const std::vector<int>& sizes, int nt_space,
                                                     const std::vector<int>& steps, int nx_time) {
  std::vector<ConvergenceRow> rows;
  const auto zero_u = [](int nt, double T) { return ControlTrajectory::zeros(nt, T); };
  const Rect omega{0.25, 0.75, 0.25, 0.75};
  for (int n : sizes) {
    const auto grid = make_grid({n, n, 1.0, 1.0, omega});
    SolverParams p = params;
    p.nt = nt_space;
    const ManufacturedCase mc = manufactured_spatial(*grid, p, amplitude);
    const StateTrajectory st = solve_state(*grid, p, mc.y0, mc.f0, zero_u(p.nt, p.T));
    ConvergenceRow r{"space", n, 1.0 / n, l2q_error(*grid, p.dt(), st.y, mc.exact), std::nullopt};
    if (!rows.empty() && rows.back().study == "space") r.order = std::log2(rows.back().error / r.error);
    rows.push_back(r);
  }
  const auto grid = make_grid({nx_time, nx_time, 1.0, 1.0, omega});
  for (int nt : steps) {
    SolverParams p = params;
    p.nt = nt;
    const ManufacturedCase mc = manufactured_temporal(*grid, p, amplitude);
    const StateTrajectory st = solve_state(*grid, p, mc.y0, mc.f0, zero_u(p.nt, p.T));
    ConvergenceRow r{"time", nt, p.dt(), l2q_error(*grid, p.dt(), st.y, mc.exact), std::nullopt};
    if (!rows.empty() && rows.back().study == "time") r.order = std::log2(rows.back().error / r.error);
    rows.push_back(r);
  }
  return rows;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "study,n,h,error,order\n";
  for (const ConvergenceRow& r : rows) {
    os << r.study << ',' << r.n << ',' << format_double(r.h) << ',' << format_double(r.error) << ','
       << (r.order ? format_double(*r.order) : std::string()) << '\n';
  }
}

}  // namespace nsmc
