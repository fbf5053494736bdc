#pragma once

#include "nsmc/config.hpp"
#include "nsmc/objective.hpp"

#include <random>

namespace fixture {

inline std::shared_ptr<const nsmc::Grid> small_grid(int n = 12) {
  return nsmc::make_grid({n, n, 1.0, 1.0, {0.25, 0.75, 0.25, 0.75}});
}

inline nsmc::SolverParams small_params(int nt = 8) {
  nsmc::SolverParams p;
  p.nt = nt;
  return p;
}

inline nsmc::Vec random_vec(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  nsmc::Vec v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

/// Divergence-free dof field from a random corner streamfunction.
inline nsmc::Vec random_solenoidal(const nsmc::Grid& g, unsigned seed) {
  return g.curl() * random_vec(g.n_corners(), seed);
}

inline nsmc::ControlTrajectory constant_control(int nt, double T, std::vector<nsmc::Atom> c1,
                                                std::vector<nsmc::Atom> c2) {
  nsmc::VectorAtomicMeasure m{nsmc::ScalarAtomicMeasure(std::move(c1)), nsmc::ScalarAtomicMeasure(std::move(c2))};
  return nsmc::ControlTrajectory(T, std::vector<nsmc::VectorAtomicMeasure>(static_cast<std::size_t>(nt), m));
}

/// Tracking problem whose target is the state of a two-atom control, on a small grid.
struct SmallProblem {
  std::shared_ptr<const nsmc::Grid> grid = small_grid();
  nsmc::SolverParams params = small_params();
  nsmc::ControlTrajectory reference =
      constant_control(8, 1.0, {{{0.375, 0.5}, 1.0}}, {{{0.625, 0.625}, -1.0}});
  nsmc::ProblemData data;

  SmallProblem() {
    data.y0 = grid->zero_velocity();
    const auto st = nsmc::solve_state(*grid, params, data.y0, data.f0, reference);
    for (int n = 0; n <= params.nt; ++n) data.y_d.push_back(st.velocity(*grid, n));
  }
};

}  // namespace fixture
