#include "nsmc/grid.hpp"

#include "nsmc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nsmc {

namespace {

using Triplet = Eigen::Triplet<double>;

/// Bracket of a coordinate on a 1D lattice; index -1 marks a virtual wall node.
struct Bracket1D {
  int lo = -1;
  int hi = -1;
  double w_lo = 0.0;
  double w_hi = 0.0;
};

/// Nodes at k*h, k = 0..n (faces normal to this direction).
Bracket1D bracket_aligned(double s, double h, int n) {
  const int k = static_cast<int>(std::lround(s / h));
  if (k >= 0 && k <= n && static_cast<double>(k) * h == s) return {k, -1, 1.0, 0.0};
  int k0 = static_cast<int>(std::floor(s / h));
  k0 = std::clamp(k0, 0, n - 1);
  const double theta = (s - static_cast<double>(k0) * h) / h;
  return {k0, k0 + 1, 1.0 - theta, theta};
}

/// Nodes at (k+1/2)*h, k = 0..n-1, plus virtual zero-valued wall nodes at 0 and n*h.
Bracket1D bracket_offset(double s, double h, int n) {
  const int k = static_cast<int>(std::lround(s / h - 0.5));
  if (k >= 0 && k < n && (static_cast<double>(k) + 0.5) * h == s) return {k, -1, 1.0, 0.0};
  const double half = 0.5 * h;
  const double length = static_cast<double>(n) * h;
  if (s < half) {
    const double theta = s / half;
    return {-1, 0, 1.0 - theta, theta};
  }
  if (s > length - half) {
    const double theta = (length - s) / half;
    return {n - 1, -1, theta, 1.0 - theta};
  }
  int k0 = static_cast<int>(std::floor(s / h - 0.5));
  k0 = std::clamp(k0, 0, n - 2);
  const double theta = (s - (static_cast<double>(k0) + 0.5) * h) / h;
  return {k0, k0 + 1, 1.0 - theta, theta};
}

void append(std::vector<StencilEntry>& out, const Bracket1D& bx, const Bracket1D& by) {
  const std::array<std::pair<int, double>, 2> xs{{{bx.lo, bx.w_lo}, {bx.hi, bx.w_hi}}};
  const std::array<std::pair<int, double>, 2> ys{{{by.lo, by.w_lo}, {by.hi, by.w_hi}}};
  for (const auto& [j, wy] : ys) {
    if (j < 0 || wy == 0.0) continue;
    for (const auto& [i, wx] : xs) {
      if (i < 0 || wx == 0.0) continue;
      out.push_back({i, j, wx * wy});
    }
  }
}

}  // namespace

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  if (spec.nx < 4 || spec.ny < 4) {
    throw std::invalid_argument("grid: nx and ny must be >= 4 (got " + std::to_string(spec.nx) +
                                ", " + std::to_string(spec.ny) + ")");
  }
  if (!(spec.lx > 0.0) || !(spec.ly > 0.0) || !std::isfinite(spec.lx) || !std::isfinite(spec.ly)) {
    throw std::invalid_argument("grid: domain lengths must be positive and finite");
  }
  const Rect& w = spec.omega;
  if (!(w.x0 <= w.x1) || !(w.y0 <= w.y1)) {
    throw std::invalid_argument("grid: omega is empty");
  }
  if (w.x0 < 0.0 || w.y0 < 0.0 || w.x1 > spec.lx || w.y1 > spec.ly) {
    throw std::invalid_argument("grid: omega is not contained in the closed domain");
  }
  hx_ = spec.lx / spec.nx;
  hy_ = spec.ly / spec.ny;
  n_dofs_x_ = (spec.nx - 1) * spec.ny;
  n_dofs_y_ = spec.nx * (spec.ny - 1);
  build_operators();
  build_omega_nodes();
}

Grid::~Grid() = default;

std::shared_ptr<const Grid> make_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

VelocityField Grid::zero_velocity() const {
  return {Array2D(nx() + 1, ny()), Array2D(nx(), ny() + 1)};
}

PressureField Grid::zero_pressure() const { return {Array2D(nx(), ny())}; }

int Grid::dof(Component c, int i, int j) const {
  const int nx = spec_.nx;
  const int ny = spec_.ny;
  if (c == Component::x) {
    if (i < 1 || i > nx - 1 || j < 0 || j > ny - 1) return -1;
    return (i - 1) + (nx - 1) * j;
  }
  if (i < 0 || i > nx - 1 || j < 1 || j > ny - 1) return -1;
  return n_dofs_x_ + i + nx * (j - 1);
}

Point Grid::node_position(Component c, int i, int j) const {
  if (c == Component::x) return {static_cast<double>(i) * hx_, (static_cast<double>(j) + 0.5) * hy_};
  return {(static_cast<double>(i) + 0.5) * hx_, static_cast<double>(j) * hy_};
}

Vec Grid::to_dofs(const VelocityField& field) const {
  Vec out(n_dofs());
  for (Component c : kComponents) {
    const Array2D& a = field[c];
    for (int j = 0; j < a.nj(); ++j) {
      for (int i = 0; i < a.ni(); ++i) {
        const int k = dof(c, i, j);
        if (k >= 0) out[k] = a(i, j);
      }
    }
  }
  return out;
}

VelocityField Grid::from_dofs(const Vec& dofs) const {
  VelocityField f = zero_velocity();
  for (Component c : kComponents) {
    Array2D& a = f[c];
    for (int j = 0; j < a.nj(); ++j) {
      for (int i = 0; i < a.ni(); ++i) {
        const int k = dof(c, i, j);
        if (k >= 0) a(i, j) = dofs[k];
      }
    }
  }
  return f;
}

bool Grid::in_omega_mask(Component c, int i, int j) const {
  return dof(c, i, j) >= 0 && spec_.omega.contains(node_position(c, i, j));
}

std::vector<StencilEntry> Grid::stencil(Point position, Component c) const {
  std::vector<StencilEntry> out;
  out.reserve(4);
  if (c == Component::x) {
    append(out, bracket_aligned(position.x, hx_, spec_.nx), bracket_offset(position.y, hy_, spec_.ny));
  } else {
    append(out, bracket_offset(position.x, hx_, spec_.nx), bracket_aligned(position.y, hy_, spec_.ny));
  }
  return out;
}

double Grid::face_weight(Component c, int i, int j) const {
  const bool boundary = c == Component::x ? (i == 0 || i == spec_.nx) : (j == 0 || j == spec_.ny);
  return boundary ? 0.5 * hx_ * hy_ : hx_ * hy_;
}

void Grid::build_operators() {
  const int nx = spec_.nx;
  const int ny = spec_.ny;
  const double ihx2 = 1.0 / (hx_ * hx_);
  const double ihy2 = 1.0 / (hy_ * hy_);

  // -Laplacian. Along the normal direction the neighbours are faces (boundary faces
  // are zero); along the tangential direction a missing neighbour is a ghost
  // reflected across the wall.
  std::vector<Triplet> lap;
  auto add_axis = [&](int row, int nb_lo, int nb_hi, bool lo_exists, bool hi_exists, bool normal,
                      double ih2, double& diag) {
    for (auto [nb, exists] : {std::pair{nb_lo, lo_exists}, std::pair{nb_hi, hi_exists}}) {
      if (exists) {
        diag += ih2;
        if (nb >= 0) lap.emplace_back(row, nb, -ih2);
      } else {
        diag += normal ? ih2 : 2.0 * ih2;
      }
    }
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const int r = dof(Component::x, i, j);
      double diag = 0.0;
      add_axis(r, dof(Component::x, i - 1, j), dof(Component::x, i + 1, j), true, true, true, ihx2, diag);
      add_axis(r, dof(Component::x, i, j - 1), dof(Component::x, i, j + 1), j > 0, j < ny - 1, false,
               ihy2, diag);
      lap.emplace_back(r, r, diag);
    }
  }
  for (int j = 1; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int r = dof(Component::y, i, j);
      double diag = 0.0;
      add_axis(r, dof(Component::y, i - 1, j), dof(Component::y, i + 1, j), i > 0, i < nx - 1, false,
               ihx2, diag);
      add_axis(r, dof(Component::y, i, j - 1), dof(Component::y, i, j + 1), true, true, true, ihy2, diag);
      lap.emplace_back(r, r, diag);
    }
  }
  neg_laplacian_.resize(n_dofs(), n_dofs());
  neg_laplacian_.setFromTriplets(lap.begin(), lap.end());

  std::vector<Triplet> div;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int cell = i + nx * j;
      if (int k = dof(Component::x, i + 1, j); k >= 0) div.emplace_back(cell, k, 1.0 / hx_);
      if (int k = dof(Component::x, i, j); k >= 0) div.emplace_back(cell, k, -1.0 / hx_);
      if (int k = dof(Component::y, i, j + 1); k >= 0) div.emplace_back(cell, k, 1.0 / hy_);
      if (int k = dof(Component::y, i, j); k >= 0) div.emplace_back(cell, k, -1.0 / hy_);
    }
  }
  divergence_.resize(n_cells(), n_dofs());
  divergence_.setFromTriplets(div.begin(), div.end());
  gradient_ = SpMat(-SpMat(divergence_.transpose()));

  auto corner = [&](int i, int j) {
    return (i >= 1 && i <= nx - 1 && j >= 1 && j <= ny - 1) ? (i - 1) + (nx - 1) * (j - 1) : -1;
  };
  std::vector<Triplet> curl;
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const int r = dof(Component::x, i, j);
      if (int k = corner(i, j + 1); k >= 0) curl.emplace_back(r, k, 1.0 / hy_);
      if (int k = corner(i, j); k >= 0) curl.emplace_back(r, k, -1.0 / hy_);
    }
  }
  for (int j = 1; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int r = dof(Component::y, i, j);
      if (int k = corner(i + 1, j); k >= 0) curl.emplace_back(r, k, -1.0 / hx_);
      if (int k = corner(i, j); k >= 0) curl.emplace_back(r, k, 1.0 / hx_);
    }
  }
  curl_.resize(n_dofs(), n_corners());
  curl_.setFromTriplets(curl.begin(), curl.end());

  // Divergence-form convection (Harlow-Welch averaging). Each flux is
  // (average of two advecting faces) * (average of two advected faces).
  std::vector<ConvectionTerm> terms;
  auto flux = [&](int out, double coef, std::array<int, 2> adv, std::array<int, 2> val) {
    for (int a : adv) {
      if (a < 0) continue;
      for (int v : val) {
        if (v < 0) continue;
        terms.push_back({out, a, v, 0.25 * coef});
      }
    }
  };
  auto X = [&](int i, int j) { return dof(Component::x, i, j); };
  auto Y = [&](int i, int j) { return dof(Component::y, i, j); };
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const int o = X(i, j);
      flux(o, 1.0 / hx_, {X(i, j), X(i + 1, j)}, {X(i, j), X(i + 1, j)});
      flux(o, -1.0 / hx_, {X(i - 1, j), X(i, j)}, {X(i - 1, j), X(i, j)});
      flux(o, 1.0 / hy_, {Y(i - 1, j + 1), Y(i, j + 1)}, {X(i, j), X(i, j + 1)});
      flux(o, -1.0 / hy_, {Y(i - 1, j), Y(i, j)}, {X(i, j - 1), X(i, j)});
    }
  }
  for (int j = 1; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int o = Y(i, j);
      flux(o, 1.0 / hx_, {X(i + 1, j - 1), X(i + 1, j)}, {Y(i, j), Y(i + 1, j)});
      flux(o, -1.0 / hx_, {X(i, j - 1), X(i, j)}, {Y(i - 1, j), Y(i, j)});
      flux(o, 1.0 / hy_, {Y(i, j), Y(i, j + 1)}, {Y(i, j), Y(i, j + 1)});
      flux(o, -1.0 / hy_, {Y(i, j - 1), Y(i, j)}, {Y(i, j - 1), Y(i, j)});
    }
  }
  convection_ = std::make_unique<ConvectionTensor>(n_dofs(), std::move(terms));

  // Cell Poisson operator D D^T, singular on constants; pin cell 0.
  const SpMat ddt = divergence_ * SpMat(divergence_.transpose());
  std::vector<Triplet> pin;
  for (int k = 0; k < ddt.outerSize(); ++k) {
    for (SpMat::InnerIterator it(ddt, k); it; ++it) {
      if (it.row() == 0 || it.col() == 0) continue;
      pin.emplace_back(it.row(), it.col(), it.value());
    }
  }
  pin.emplace_back(0, 0, 1.0);
  SpMat pinned(n_cells(), n_cells());
  pinned.setFromTriplets(pin.begin(), pin.end());
  poisson_.compute(pinned);
  if (poisson_.info() != Eigen::Success) throw std::runtime_error("grid: Poisson factorization failed");
}

void Grid::build_omega_nodes() {
  for (Component c : kComponents) {
    auto& nodes = omega_nodes_[index_of(c)];
    const int ni = c == Component::x ? nx() + 1 : nx();
    const int nj = c == Component::x ? ny() : ny() + 1;
    for (int i = 0; i < ni; ++i) {
      for (int j = 0; j < nj; ++j) {
        if (!in_omega_mask(c, i, j)) continue;
        nodes.push_back({node_position(c, i, j), i, j, dof(c, i, j)});
      }
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const OmegaNode& a, const OmegaNode& b) { return a.position < b.position; });
  }
}

Array2D Grid::divergence(const VelocityField& field) const {
  Array2D out(nx(), ny());
  for (int j = 0; j < ny(); ++j) {
    for (int i = 0; i < nx(); ++i) {
      out(i, j) = (field.ux(i + 1, j) - field.ux(i, j)) / hx_ + (field.uy(i, j + 1) - field.uy(i, j)) / hy_;
    }
  }
  return out;
}

double Grid::max_abs_divergence(const VelocityField& field) const {
  double m = 0.0;
  const Array2D div = divergence(field);
  for (double d : div.values()) m = std::max(m, std::abs(d));
  return m;
}

bool Grid::satisfies_no_slip(const VelocityField& field) const {
  for (int j = 0; j < ny(); ++j) {
    if (field.ux(0, j) != 0.0 || field.ux(nx(), j) != 0.0) return false;
  }
  for (int i = 0; i < nx(); ++i) {
    if (field.uy(i, 0) != 0.0 || field.uy(i, ny()) != 0.0) return false;
  }
  return true;
}

VelocityField Grid::project(const VelocityField& field) const {
  Vec y = to_dofs(field);
  Vec rhs = divergence_ * y;
  rhs[0] = 0.0;
  const Vec q = poisson_.solve(rhs);
  y -= divergence_.transpose() * q;
  return from_dofs(y);
}

PressureField Grid::pressure_from_residual(const Vec& residual) const {
  Vec rhs = -(divergence_ * residual);
  rhs[0] = 0.0;
  Vec p = poisson_.solve(rhs);
  p.array() -= p.mean();
  PressureField out = zero_pressure();
  for (int j = 0; j < ny(); ++j) {
    for (int i = 0; i < nx(); ++i) out.p(i, j) = p[i + nx() * j];
  }
  return out;
}

double Grid::inner(const VelocityField& a, const VelocityField& b) const {
  double s = 0.0;
  for (Component c : kComponents) {
    const Array2D& fa = a[c];
    const Array2D& fb = b[c];
    for (int j = 0; j < fa.nj(); ++j) {
      for (int i = 0; i < fa.ni(); ++i) s += face_weight(c, i, j) * fa(i, j) * fb(i, j);
    }
  }
  return s;
}

VelocityField spread_atom(const Grid& grid, Point position, double weight, Component c) {
  if (!grid.omega().contains(position)) {
    throw std::domain_error("spread_atom: position outside the control window");
  }
  VelocityField f = grid.zero_velocity();
  const double density = weight / grid.cell_area();
  for (const StencilEntry& e : grid.stencil(position, c)) f[c](e.i, e.j) += density * e.weight;
  return f;
}

double interpolate_field(const Grid& grid, const VelocityField& field, Point position, Component c) {
  const GridSpec& s = grid.spec();
  if (position.x < 0.0 || position.x > s.lx || position.y < 0.0 || position.y > s.ly) {
    throw std::domain_error("interpolate_field: position outside the closed domain");
  }
  double v = 0.0;
  for (const StencilEntry& e : grid.stencil(position, c)) v += e.weight * field[c](e.i, e.j);
  return v;
}

}  // namespace nsmc
