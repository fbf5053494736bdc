#include "doctest.h"
#include "fixtures.hpp"
#include "nsmc/adjoint.hpp"
#include "nsmc/linearized.hpp"

using namespace nsmc;

TEST_CASE("trapezoid weights") {
  CHECK(trapezoid_weight(0, 4) == 0.5);
  CHECK(trapezoid_weight(2, 4) == 1.0);
  CHECK(trapezoid_weight(4, 4) == 0.5);
}

TEST_CASE("adjoint duality with the linearized map") {
  fixture::SmallProblem pb;
  const auto& g = *pb.grid;
  const auto u = random_control(g.omega(), pb.params.nt, 1.0, 1.0, 2, 3, 0);
  const auto base = solve_state(g, pb.params, pb.data.y0, {}, u);
  const auto adj = solve_adjoint(g, pb.params, base, pb.data.y_d);
  REQUIRE(adj.nt() == pb.params.nt);
  CHECK(adj.phi.back().norm() == 0.0);
  for (int k = 0; k < 3; ++k) {
    const auto v = random_control(g.omega(), pb.params.nt, 1.0, 1.0, 3, 11, k);
    const auto z = solve_linearized(g, pb.params, base, v);
    double lhs = 0.0;
    for (int n = 0; n <= pb.params.nt; ++n) {
      lhs += trapezoid_weight(n, pb.params.nt) * (base.y[n] - g.to_dofs(pb.data.y_d[n])).dot(z.y[n]);
    }
    lhs *= pb.params.dt() * g.cell_area();
    double rhs = 0.0;
    for (int n = 0; n < pb.params.nt; ++n) rhs += control_pairing(g, v[n], adj.phi[n]);
    rhs *= pb.params.dt();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("adjoint is solenoidal and psi is the sup over omega") {
  fixture::SmallProblem pb;
  const auto& g = *pb.grid;
  const auto base = solve_state(g, pb.params, pb.data.y0, {}, ControlTrajectory::zeros(pb.params.nt, 1.0));
  const auto adj = solve_adjoint(g, pb.params, base, pb.data.y_d);
  for (int n = 0; n <= adj.nt(); ++n) {
    CHECK(g.max_abs_divergence(adj.velocity(g, n)) <= 1e-10);
    for (Component c : kComponents) {
      double m = 0.0;
      for (const auto& node : g.omega_nodes(c)) m = std::max(m, std::abs(adj.phi[n][node.dof]));
      CHECK(adj.psi[n][index_of(c)] == m);
      const auto s = sup_norm_on_omega(g, adj, n, c);
      CHECK(s.value == m);
    }
  }
  CHECK(adj.psi[0][0] > 0.0);
}

TEST_CASE("sup norm ties go to the first node") {
  const auto g = fixture::small_grid();
  const auto s = sup_norm_on_omega(*g, Vec::Zero(g->n_dofs()), Component::y);
  CHECK(s.value == 0.0);
  CHECK(s.node.position == g->omega_nodes(Component::y).front().position);
}
