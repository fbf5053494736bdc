#include "doctest.h"
#include "fixtures.hpp"

#include <sstream>

using namespace nsmc;

TEST_CASE("atomic measures merge, sort and prune") {
  const ScalarAtomicMeasure m({{{0.5, 0.5}, 1.0}, {{0.3, 0.4}, -2.0}, {{0.5, 0.5}, 0.5}, {{0.6, 0.6}, 1e-14}}, 1e-12);
  REQUIRE(m.size() == 2);
  CHECK(m.atoms()[0].position == Point{0.3, 0.4});
  CHECK(m.atoms()[1].weight == 1.5);
  CHECK(m.total_variation() == 3.5);
  CHECK(m.positive_part().size() == 1);
  CHECK(m.negative_part().atoms()[0].weight == -2.0);
  const ScalarAtomicMeasure cancel({{{0.5, 0.5}, 1.0}, {{0.5, 0.5}, -1.0}});
  CHECK(cancel.empty());
}

TEST_CASE("merging is independent of input order") {
  std::vector<Atom> a{{{0.1, 0.2}, 0.1}, {{0.1, 0.2}, 0.2}, {{0.1, 0.2}, 0.3}, {{0.4, 0.2}, 1.0}};
  std::vector<Atom> b{a[2], a[3], a[0], a[1]};
  CHECK(ScalarAtomicMeasure(a) == ScalarAtomicMeasure(b));
}

TEST_CASE("axpy and tv norm of vector measures") {
  const ScalarAtomicMeasure u({{{0.3, 0.3}, 1.0}});
  const ScalarAtomicMeasure v({{{0.3, 0.3}, -1.0}, {{0.4, 0.4}, 2.0}});
  const ScalarAtomicMeasure w = axpy(1.0, v, u);
  REQUIRE(w.size() == 1);
  CHECK(w.atoms()[0].weight == 2.0);
  const VectorAtomicMeasure m{u, v};
  CHECK(tv_norm(m) == 3.0);
}

TEST_CASE("Lebesgue decomposition and directional derivative of the norm") {
  const ScalarAtomicMeasure u({{{0.3, 0.3}, -2.0}, {{0.5, 0.5}, 1.0}});
  const ScalarAtomicMeasure v({{{0.3, 0.3}, 1.0}, {{0.7, 0.7}, -0.5}});
  const auto d = lebesgue_decompose(v, u);
  REQUIRE(d.density.size() == 2);
  CHECK(d.density[0] == 0.5);
  CHECK(d.density[1] == 0.0);
  CHECK(d.singular.size() == 1);
  // d/ds |u + s v| at s = 0+: -1 from the shrinking atom, +0.5 from the new one.
  CHECK(j_directional(u, v) == doctest::Approx(-0.5));
  const double s = 1e-7;
  const double fd = (axpy(s, v, u).total_variation() - u.total_variation()) / s;
  CHECK(fd == doctest::Approx(j_directional(u, v)).epsilon(1e-8));
}

TEST_CASE("control trajectories") {
  auto u = fixture::constant_control(4, 2.0, {{{0.4, 0.4}, 0.5}}, {{{0.5, 0.6}, -1.0}});
  CHECK(u.nt() == 4);
  CHECK(u.dt() == 0.5);
  CHECK(u.feasible(1.0));
  CHECK(!u.feasible(0.9));
  CHECK(u.max_tv_norm() == 1.0);
  CHECK(u.total_atoms(Component::y) == 4);
  CHECK(scaled(u, 0.0).is_zero());
  CHECK_THROWS_AS(axpy(1.0, ControlTrajectory::zeros(3, 2.0), u), std::invalid_argument);
  CHECK_THROWS_AS(ControlTrajectory::zeros(0, 1.0), std::invalid_argument);
}

TEST_CASE("control csv round trip is bitwise") {
  const auto u = random_control({0.25, 0.75, 0.25, 0.75}, 5, 1.0, 1.0, 3, 42, 0);
  std::stringstream ss;
  write_control_csv(ss, u);
  const auto back = read_control_csv(ss, 5, 1.0);
  for (int n = 0; n < 5; ++n) CHECK(back[n] == u[n]);
  std::stringstream bad("t_index,component,x,y,weight\n0,3,0.5,0.5,1\n");
  CHECK_THROWS_AS(read_control_csv(bad, 5, 1.0), std::runtime_error);
}

TEST_CASE("random controls are feasible and reproducible") {
  const Rect w{0.25, 0.75, 0.25, 0.75};
  const auto a = random_control(w, 6, 1.0, 2.0, 4, 9, 3);
  const auto b = random_control(w, 6, 1.0, 2.0, 4, 9, 3);
  const auto c = random_control(w, 6, 1.0, 2.0, 4, 9, 4);
  CHECK(a.feasible(2.0, 0.0));
  for (int n = 0; n < 6; ++n) CHECK(a[n] == b[n]);
  CHECK(!(a[0] == c[0]));
  for (const Atom& at : a[2].comp1.atoms()) CHECK(w.contains(at.position));
}
