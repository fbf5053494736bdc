#include "doctest.h"
#include "fixtures.hpp"
#include "nsmc/optimizer.hpp"

#include <omp.h>

using namespace nsmc;

TEST_CASE("optimizer config validation") {
  CgmConfig c;
  CHECK_NOTHROW(c.validate());
  c.gamma = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = CgmConfig{};
  c.armijo_shrink = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("lmo is a single extremal atom and matches the serial reference") {
  fixture::SmallProblem pb;
  const auto rec = eval_J(pb.grid, pb.params, pb.data, ControlTrajectory::zeros(pb.params.nt, 1.0));
  const double gamma = 1.3;
  const auto s = serial::lmo(*pb.grid, rec.adjoint, gamma);
  for (int threads : {1, 3}) {
    omp_set_num_threads(threads);
    const auto p = lmo(*pb.grid, rec.adjoint, gamma);
    for (int n = 0; n < pb.params.nt; ++n) CHECK(p[n] == s[n]);
  }
  omp_set_num_threads(omp_get_num_procs());
  for (int n = 0; n < pb.params.nt; ++n) {
    for (Component c : kComponents) {
      CHECK(s[n][c].size() <= 1);
      const double psi = rec.adjoint.psi[n][index_of(c)];
      if (psi > 0.0) {
        REQUIRE(s[n][c].size() == 1);
        const Atom& a = s[n][c].atoms()[0];
        CHECK(std::abs(a.weight) == gamma);
        const auto node = sup_norm_on_omega(*pb.grid, rec.adjoint, n, c).node;
        CHECK(a.position == node.position);
        CHECK(a.weight * rec.adjoint.phi[n][node.dof] < 0.0);
      } else {
        CHECK(s[n][c].empty());
      }
    }
  }
}

TEST_CASE("lmo minimizes the pairing over random feasible controls") {
  fixture::SmallProblem pb;
  const auto rec = eval_J(pb.grid, pb.params, pb.data, ControlTrajectory::zeros(pb.params.nt, 1.0));
  const auto star = lmo(*pb.grid, rec.adjoint, 1.0);
  const double best = pairing(rec, star);
  for (int k = 0; k < 50; ++k) {
    const auto v = random_control(pb.grid->omega(), pb.params.nt, 1.0, 1.0, 1 + k % 4, 77, k);
    CHECK(best <= pairing(rec, v));
  }
  CHECK(fw_gap(rec, rec.control, star) == doctest::Approx(-best));
}

TEST_CASE("lmo of a vanishing adjoint is empty") {
  const auto g = fixture::small_grid();
  AdjointTrajectory adj;
  adj.dt = 0.25;
  adj.phi.assign(5, Vec::Zero(g->n_dofs()));
  adj.psi.assign(5, {0.0, 0.0});
  adj.argmax.assign(5, {0, 0});
  CHECK(lmo(*g, adj, 1.0).is_zero());
}

TEST_CASE("conditional gradient decreases J and stays feasible") {
  fixture::SmallProblem pb;
  CgmConfig cfg;
  cfg.max_iter = 6;
  std::vector<double> tv;
  const auto res = optimize(pb.grid, pb.params, pb.data, ControlTrajectory::zeros(pb.params.nt, 1.0), cfg,
                            [&](int, const ControlTrajectory& u) { tv.push_back(u.max_tv_norm()); });
  const auto& e = res.log.entries;
  REQUIRE(e.size() >= 2);
  for (std::size_t k = 1; k < e.size(); ++k) CHECK(e[k].J <= e[k - 1].J);
  for (double t : tv) CHECK(t <= 1.0 + 1e-12);
  CHECK(e.back().gap < e.front().gap);
  CHECK(res.record.j_value == e.back().J);
  CHECK(!res.log.stop_reason.empty());
}

TEST_CASE("optimizer rejects infeasible starts") {
  fixture::SmallProblem pb;
  CHECK_THROWS_AS(optimize(pb.grid, pb.params, pb.data, scaled(pb.reference, 2.0), CgmConfig{}),
                  std::invalid_argument);
}

TEST_CASE("harmonic steps also decrease the gap") {
  fixture::SmallProblem pb;
  CgmConfig cfg;
  cfg.step_rule = StepRule::harmonic;
  cfg.max_iter = 4;
  const auto res = optimize(pb.grid, pb.params, pb.data, ControlTrajectory::zeros(pb.params.nt, 1.0), cfg);
  CHECK(res.log.entries.back().J < res.log.entries.front().J);
}
