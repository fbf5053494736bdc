#pragma once

/// @file measures.hpp
/// @brief Signed atomic measures on the control window and piecewise-constant
/// control trajectories built from them.

#include "nsmc/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace nsmc {

struct Atom {
  Point position;
  double weight = 0.0;
  bool operator==(const Atom&) const = default;
};

/// Finite signed combination of Dirac masses. Atoms are kept sorted by
/// position, positions are unique (equal positions are merged), and atoms with
/// |weight| <= prune_tol (always including exact zeros) are dropped.
class ScalarAtomicMeasure {
 public:
  ScalarAtomicMeasure() = default;
  explicit ScalarAtomicMeasure(std::vector<Atom> atoms, double prune_tol = 0.0);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  /// Sum of |weights|.
  double total_variation() const;
  ScalarAtomicMeasure scaled(double a) const;
  /// Jordan decomposition: atoms with positive / negative weight (both returned
  /// with their signed weights, so that u = positive_part() + negative_part()).
  ScalarAtomicMeasure positive_part() const;
  ScalarAtomicMeasure negative_part() const;

  bool operator==(const ScalarAtomicMeasure&) const = default;

 private:
  std::vector<Atom> atoms_;
};

/// a*v + u with merging of coincident atoms and pruning.
ScalarAtomicMeasure axpy(double a, const ScalarAtomicMeasure& v, const ScalarAtomicMeasure& u,
                         double prune_tol = 0.0);

struct VectorAtomicMeasure {
  ScalarAtomicMeasure comp1;
  ScalarAtomicMeasure comp2;

  const ScalarAtomicMeasure& operator[](Component c) const { return c == Component::x ? comp1 : comp2; }
  ScalarAtomicMeasure& operator[](Component c) { return c == Component::x ? comp1 : comp2; }
  bool operator==(const VectorAtomicMeasure&) const = default;
};

/// max(|u1|, |u2|): the norm of M(omega) x M(omega) used by the admissible set.
double tv_norm(const VectorAtomicMeasure& m);

/// Control u in L^inf(0,T; M): values[n] acts on (t_n, t_{n+1}].
class ControlTrajectory {
 public:
  ControlTrajectory() = default;
  ControlTrajectory(double horizon, std::vector<VectorAtomicMeasure> values);
  static ControlTrajectory zeros(int nt, double horizon);

  int nt() const { return static_cast<int>(values_.size()); }
  double horizon() const { return horizon_; }
  double dt() const { return horizon_ / nt(); }

  const VectorAtomicMeasure& operator[](int n) const { return values_[n]; }
  VectorAtomicMeasure& operator[](int n) { return values_[n]; }
  std::span<const VectorAtomicMeasure> values() const { return values_; }

  /// tv_norm(values[n]) <= gamma + tol for every n.
  bool feasible(double gamma, double tol = 1e-12) const;
  double max_tv_norm() const;
  /// Largest atom count of a component over all time steps.
  std::size_t max_atoms(Component c) const;
  std::size_t total_atoms(Component c) const;
  bool is_zero() const;

  bool operator==(const ControlTrajectory&) const = default;

 private:
  double horizon_ = 0.0;
  std::vector<VectorAtomicMeasure> values_;
};

/// a*v + u, step by step. Throws std::invalid_argument on mismatched nt.
ControlTrajectory axpy(double a, const ControlTrajectory& v, const ControlTrajectory& u,
                       double prune_tol = 0.0);
ControlTrajectory scaled(const ControlTrajectory& u, double a);

/// Random control with `atoms` atoms per component and step, uniform positions
/// in `window` and weights scaled so that every tv norm lies in (0, gamma].
/// Depends only on (seed, index).
ControlTrajectory random_control(const Rect& window, int nt, double horizon, double gamma, int atoms,
                                 std::uint64_t seed, int index);

/// Lebesgue decomposition of v with respect to |u|: v = density * |u| + singular.
struct LebesgueDecomposition {
  std::vector<double> density;  ///< Radon-Nikodym value at each atom of u (same order)
  ScalarAtomicMeasure singular;
};

LebesgueDecomposition lebesgue_decompose(const ScalarAtomicMeasure& v, const ScalarAtomicMeasure& u);

/// One-sided directional derivative of the total variation at u in direction v:
///   j'(u; v) = sum_{x in supp u} g_v(x) u({x}) + |v_s|.
double j_directional(const ScalarAtomicMeasure& u, const ScalarAtomicMeasure& v);

/// CSV `t_index,component,x,y,weight`, 17 significant digits.
void write_control_csv(std::ostream& os, const ControlTrajectory& u);
/// Throws std::runtime_error on malformed rows or t_index outside [0, nt).
ControlTrajectory read_control_csv(std::istream& is, int nt, double horizon);

}  // namespace nsmc
