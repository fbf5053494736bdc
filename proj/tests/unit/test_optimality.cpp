#include "doctest.h"
#include "fixtures.hpp"
#include "nsmc/optimality.hpp"
#include "nsmc/optimizer.hpp"

using namespace nsmc;

namespace {

// Adjoint with a prescribed field on every step.
AdjointTrajectory synthetic_adjoint(const Grid& g, int nt, const Vec& field) {
  AdjointTrajectory adj;
  adj.dt = 1.0 / nt;
  for (int n = 0; n <= nt; ++n) {
    adj.phi.push_back(n < nt ? field : Vec::Zero(g.n_dofs()));
    std::array<double, 2> psi{};
    std::array<int, 2> arg{};
    for (Component c : kComponents) {
      const auto& nodes = g.omega_nodes(c);
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double v = std::abs(adj.phi.back()[nodes[k].dof]);
        if (v > psi[index_of(c)]) {
          psi[index_of(c)] = v;
          arg[index_of(c)] = static_cast<int>(k);
        }
      }
    }
    adj.psi.push_back(psi);
    adj.argmax.push_back(arg);
  }
  return adj;
}

}  // namespace

TEST_CASE("first-order check of a stationary control") {
  const auto g = fixture::small_grid();
  const Vec field = fixture::random_vec(g->n_dofs(), 12);
  const auto adj = synthetic_adjoint(*g, 4, field);
  const auto u = lmo(*g, adj, 2.0);
  const auto r = check_first_order(*g, u, adj, 2.0);
  CHECK(r.max_psi > 0.0);
  CHECK(r.tol_psi == kPsiRelTol * r.max_psi);
  CHECK(r.max_norm_gap == 0.0);
  CHECK(r.max_support_residual <= 1e-15 * r.max_psi);
  CHECK(r.steps.size() == 8);
}

TEST_CASE("first-order check reports a non-stationary control") {
  const auto g = fixture::small_grid();
  const auto adj = synthetic_adjoint(*g, 4, fixture::random_vec(g->n_dofs(), 12));
  const auto u = fixture::constant_control(4, 1.0, {{{0.5, 0.5}, 0.3}}, {});
  const auto r = check_first_order(*g, u, adj, 2.0);
  CHECK(r.max_norm_gap > 1.0);
  CHECK(r.max_support_residual > 0.1 * r.max_psi);
}

TEST_CASE("zero direction lies in both cones") {
  fixture::SmallProblem pb;
  const auto rec = eval_J(pb.grid, pb.params, pb.data, pb.reference);
  const auto m = cone_membership(rec, ControlTrajectory::zeros(pb.params.nt, 1.0), ConeOptions{});
  CHECK(m.in_C);
  CHECK(m.in_C_tau);
  CHECK(m.z_norm == 0.0);
}

TEST_CASE("critical cone is contained in the extended cone") {
  fixture::SmallProblem pb;
  const auto rec = eval_J(pb.grid, pb.params, pb.data, pb.reference);
  const ConeOptions opts{1e-2, 1.0, 1e-9};
  for (int k = 0; k < 4; ++k) {
    const auto v = sample_critical_direction(rec, 5, k, opts);
    const auto m = cone_membership(rec, v, opts);
    if (m.in_C) CHECK(m.in_C_tau);
  }
  const auto scan = second_order_necessary_scan(rec, 4, 5, opts);
  CHECK(scan.n_sampled == 4);
  CHECK(scan.curvatures.size() == static_cast<std::size_t>(scan.n_critical));
  if (scan.min_curvature) CHECK(*scan.min_curvature >= 0.0);
}

TEST_CASE("growth perturbations are feasible, within radius and reproducible") {
  fixture::SmallProblem pb;
  const auto& g = *pb.grid;
  for (int k = 0; k < 10; ++k) {
    const auto a = growth_perturbation(g, pb.reference, 1.0, 0.05, 3, k);
    const auto b = growth_perturbation(g, pb.reference, 1.0, 0.05, 3, k);
    CHECK(a.feasible(1.0));
    CHECK(forcing_distance(g, a, pb.reference) <= 0.05 * (1.0 + 1e-12));
    for (int n = 0; n < pb.params.nt; ++n) CHECK(a[n] == b[n]);
  }
}

TEST_CASE("growth probe at an exact minimizer") {
  fixture::SmallProblem pb;
  const auto rec = eval_J(pb.grid, pb.params, pb.data, pb.reference);
  const auto empty = quadratic_growth_probe(rec, 0, 0.1, 1.0, 9);
  CHECK(empty.samples.empty());
  CHECK(!empty.kappa);
  const auto a = quadratic_growth_probe(rec, 6, 0.1, 1.0, 9);
  const auto b = quadratic_growth_probe(rec, 6, 0.1, 1.0, 9);
  REQUIRE(a.kappa);
  CHECK(*a.kappa > 0.0);
  CHECK(*a.kappa == *b.kappa);
  for (std::size_t k = 0; k < a.samples.size(); ++k) CHECK(a.samples[k].dJ == b.samples[k].dJ);
}
