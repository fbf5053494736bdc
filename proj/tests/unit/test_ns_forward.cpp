#include "doctest.h"
#include "fixtures.hpp"
#include "nsmc/manufactured.hpp"

using namespace nsmc;

TEST_CASE("solver parameter validation") {
  SolverParams p;
  CHECK_NOTHROW(p.validate());
  p.nu = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SolverParams{};
  p.doc_p = 2.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.doc_p = 1.5;
  p.doc_q = 5.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.doc_q = 7.0;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("zero data gives the zero state") {
  const auto g = fixture::small_grid();
  const auto p = fixture::small_params();
  const auto st = solve_state(*g, p, g->zero_velocity(), {}, ControlTrajectory::zeros(p.nt, p.T));
  REQUIRE(st.nt() == p.nt);
  for (const Vec& y : st.y) CHECK(y.norm() == 0.0);
  for (const auto& pr : st.p) CHECK(pr == g->zero_pressure());
}

TEST_CASE("controlled states are solenoidal with no slip") {
  fixture::SmallProblem pb;
  const auto st = solve_state(*pb.grid, pb.params, pb.data.y0, {}, pb.reference);
  for (int n = 0; n <= st.nt(); ++n) {
    const VelocityField f = st.velocity(*pb.grid, n);
    CHECK(pb.grid->max_abs_divergence(f) <= 1e-10);
    CHECK(pb.grid->satisfies_no_slip(f));
  }
  for (double r : st.residuals) CHECK(r <= pb.params.picard_tol);
  CHECK(st.y.back().norm() > 0.0);
}

TEST_CASE("divergent initial data is projected") {
  const auto g = fixture::small_grid();
  const auto p = fixture::small_params(2);
  const VelocityField y0 = g->from_dofs(fixture::random_vec(g->n_dofs(), 1));
  const auto st = solve_state(*g, p, y0, {}, ControlTrajectory::zeros(p.nt, p.T));
  CHECK(g->max_abs_divergence(st.velocity(*g, 0)) <= 1e-10);
}

TEST_CASE("unforced flow loses energy") {
  const auto g = fixture::small_grid();
  const auto p = fixture::small_params();
  const VelocityField y0 = g->from_dofs(fixture::random_solenoidal(*g, 2) * 0.01);
  const auto st = solve_state(*g, p, y0, {}, ControlTrajectory::zeros(p.nt, p.T));
  const auto e = kinetic_energy_trace(*g, st);
  for (std::size_t n = 1; n < e.size(); ++n) CHECK(e[n] < e[n - 1]);
}

TEST_CASE("atoms outside the control window are rejected") {
  const auto g = fixture::small_grid();
  const auto p = fixture::small_params(2);
  const auto u = fixture::constant_control(2, 1.0, {{{0.1, 0.5}, 1.0}}, {});
  CHECK_THROWS_AS(solve_state(*g, p, g->zero_velocity(), {}, u), std::domain_error);
}

TEST_CASE("mismatched inputs are rejected") {
  const auto g = fixture::small_grid();
  const auto p = fixture::small_params(4);
  CHECK_THROWS_AS(solve_state(*g, p, g->zero_velocity(), {}, ControlTrajectory::zeros(3, 1.0)),
                  std::invalid_argument);
  const FieldSeries f0(2, Vec::Zero(g->n_dofs()));
  CHECK_THROWS_AS(solve_state(*g, p, g->zero_velocity(), f0, ControlTrajectory::zeros(4, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("Picard failure raises SolverError") {
  const auto g = fixture::small_grid();
  auto p = fixture::small_params(2);
  p.picard_max = 1;
  const auto u = fixture::constant_control(2, 1.0, {{{0.5, 0.5}, 50.0}}, {});
  CHECK_THROWS_AS(solve_state(*g, p, g->zero_velocity(), {}, u), SolverError);
}

TEST_CASE("control pairing matches the forcing inner product") {
  const auto g = fixture::small_grid();
  const VectorAtomicMeasure m{ScalarAtomicMeasure({{{0.41, 0.52}, 0.7}}), ScalarAtomicMeasure({{{0.6, 0.3}, -0.2}})};
  const Vec f = control_forcing(*g, m);
  const Vec h = fixture::random_vec(g->n_dofs(), 4);
  CHECK(g->cell_area() * f.dot(h) == doctest::Approx(control_pairing(*g, m, h)).epsilon(1e-13));
}

TEST_CASE("manufactured temporal case converges at first order") {
  const auto g = fixture::small_grid(8);
  std::vector<double> err;
  for (int nt : {8, 16}) {
    auto p = fixture::small_params(nt);
    p.picard_tol = 1e-10;
    const auto mc = manufactured_temporal(*g, p, 0.5);
    const auto st = solve_state(*g, p, mc.y0, mc.f0, ControlTrajectory::zeros(nt, 1.0));
    err.push_back(l2q_error(*g, p.dt(), st.y, mc.exact));
  }
  CHECK(std::log2(err[0] / err[1]) > 0.8);
}
