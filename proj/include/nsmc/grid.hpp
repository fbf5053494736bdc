#pragma once

/// @file grid.hpp
/// @brief MAC staggered discretization of a rectangular domain with no-slip walls.
///
/// Layout (cell (i,j) spans [i*hx,(i+1)*hx] x [j*hy,(j+1)*hy]):
///   - ux(i,j), i = 0..nx, j = 0..ny-1, at (i*hx, (j+1/2)*hy)   (vertical faces)
///   - uy(i,j), i = 0..nx-1, j = 0..ny, at ((i+1/2)*hx, j*hy)   (horizontal faces)
///   - p(i,j) at cell centers.
/// Faces lying on the boundary carry the normal velocity and are fixed at zero;
/// the remaining faces are the velocity degrees of freedom ("dofs").

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <compare>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nsmc {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

class ConvectionTensor;

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend auto operator<=>(const Point&, const Point&) = default;
};

/// Axis-aligned closed rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

/// Velocity component index; matches the 1|2 convention of the control measures.
enum class Component : int { x = 1, y = 2 };

inline constexpr std::array<Component, 2> kComponents{Component::x, Component::y};

inline int index_of(Component c) { return static_cast<int>(c) - 1; }

struct GridSpec {
  int nx = 0;
  int ny = 0;
  double lx = 1.0;
  double ly = 1.0;
  Rect omega{};
};

/// Dense 2D array stored row-major with rows indexed by j (y) and columns by i (x).
class Array2D {
 public:
  Array2D() = default;
  Array2D(int ni, int nj, double value = 0.0)
      : ni_(ni), nj_(nj), data_(static_cast<std::size_t>(ni) * nj, value) {}

  int ni() const { return ni_; }
  int nj() const { return nj_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(j) * ni_ + i]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(j) * ni_ + i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool operator==(const Array2D&) const = default;

 private:
  int ni_ = 0;
  int nj_ = 0;
  std::vector<double> data_;
};

struct VelocityField {
  Array2D ux;  ///< (nx+1) x ny
  Array2D uy;  ///< nx x (ny+1)

  Array2D& operator[](Component c) { return c == Component::x ? ux : uy; }
  const Array2D& operator[](Component c) const { return c == Component::x ? ux : uy; }
  bool operator==(const VelocityField&) const = default;
};

struct PressureField {
  Array2D p;  ///< nx x ny, zero mean
  bool operator==(const PressureField&) const = default;
};

/// A velocity node inside the control window.
struct OmegaNode {
  Point position;
  int i = 0;
  int j = 0;
  int dof = -1;
};

/// One entry of a bilinear spreading/interpolation stencil on a component array.
struct StencilEntry {
  int i = 0;
  int j = 0;
  double weight = 0.0;  ///< bilinear weight, sums to one over the full (virtual-inclusive) stencil
};

/// Immutable grid with precomputed stencils. Safe to share across threads.
class Grid {
 public:
  explicit Grid(const GridSpec& spec);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  const GridSpec& spec() const { return spec_; }
  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double cell_area() const { return hx_ * hy_; }
  const Rect& omega() const { return spec_.omega; }

  VelocityField zero_velocity() const;
  PressureField zero_pressure() const;

  // Degrees of freedom: interior ux faces first (i = 1..nx-1), then interior uy faces.
  int n_dofs() const { return n_dofs_x_ + n_dofs_y_; }
  int n_dofs_x() const { return n_dofs_x_; }
  int n_cells() const { return spec_.nx * spec_.ny; }
  int n_corners() const { return (spec_.nx - 1) * (spec_.ny - 1); }

  /// Dof index of a face, or -1 for boundary faces and out-of-range indices.
  int dof(Component c, int i, int j) const;
  Point node_position(Component c, int i, int j) const;

  Vec to_dofs(const VelocityField& field) const;
  VelocityField from_dofs(const Vec& dofs) const;

  /// Nodes of component c lying in omega, sorted lexicographically by (x, y).
  const std::vector<OmegaNode>& omega_nodes(Component c) const { return omega_nodes_[index_of(c)]; }
  /// True for every face of component c whose node lies in omega and is a dof.
  bool in_omega_mask(Component c, int i, int j) const;

  /// Bilinear stencil of a point on the component lattice. Entries falling on
  /// virtual wall nodes (tangential no-slip) are omitted; entries on boundary
  /// faces are kept. A point coinciding with a node yields a single entry.
  std::vector<StencilEntry> stencil(Point position, Component c) const;

  /// -Laplacian on dofs (5-point, ghost reflection at tangential walls). Symmetric.
  const SpMat& neg_laplacian() const { return neg_laplacian_; }
  /// Cell divergence of a dof vector: (n_cells x n_dofs).
  const SpMat& divergence() const { return divergence_; }
  /// Face gradient of cell values: equals -divergence()^T.
  const SpMat& gradient() const { return gradient_; }
  /// Discrete curl of interior-corner streamfunction values: (n_dofs x n_corners).
  /// Its range is exactly the discretely divergence-free subspace.
  const SpMat& curl() const { return curl_; }
  const ConvectionTensor& convection() const { return *convection_; }

  /// Quadrature weights for L2 inner products over all faces of a component
  /// array (half weight on boundary faces, so that constants integrate to |Omega|).
  double face_weight(Component c, int i, int j) const;

  Array2D divergence(const VelocityField& field) const;
  double max_abs_divergence(const VelocityField& field) const;
  /// True when every boundary face value is exactly zero.
  bool satisfies_no_slip(const VelocityField& field) const;

  /// L2-orthogonal projection onto discretely divergence-free fields (Poisson solve).
  VelocityField project(const VelocityField& field) const;
  /// Zero-mean pressure p minimizing |G p - residual| for a face residual in dof form.
  PressureField pressure_from_residual(const Vec& residual) const;

  /// Inner product with face quadrature weights; both fields on this grid.
  double inner(const VelocityField& a, const VelocityField& b) const;

 private:
  void build_operators();
  void build_omega_nodes();

  GridSpec spec_;
  double hx_ = 0.0;
  double hy_ = 0.0;
  int n_dofs_x_ = 0;
  int n_dofs_y_ = 0;

  SpMat neg_laplacian_;
  SpMat divergence_;
  SpMat gradient_;
  SpMat curl_;
  std::unique_ptr<ConvectionTensor> convection_;
  Eigen::SimplicialLDLT<SpMat> poisson_;  // D D^T with cell 0 pinned
  std::array<std::vector<OmegaNode>, 2> omega_nodes_;
};

/// Validates the spec and builds the grid. Throws std::invalid_argument.
std::shared_ptr<const Grid> make_grid(const GridSpec& spec);

/// Forcing field of a single Dirac atom, spread bilinearly with density weight/(hx*hy).
VelocityField spread_atom(const Grid& grid, Point position, double weight, Component c);

/// Bilinear interpolation with the same weights as spread_atom (its transpose).
double interpolate_field(const Grid& grid, const VelocityField& field, Point position, Component c);

}  // namespace nsmc
