#include "doctest.h"
#include "fixtures.hpp"

#include <cmath>

using namespace nsmc;

TEST_CASE("grid dof layout and sizes") {
  const auto g = make_grid({6, 4, 1.5, 1.0, {0.2, 1.0, 0.2, 0.8}});
  CHECK(g->n_dofs_x() == 5 * 4);
  CHECK(g->n_dofs() == 5 * 4 + 6 * 3);
  CHECK(g->dof(Component::x, 0, 0) == -1);
  CHECK(g->dof(Component::x, 6, 2) == -1);
  CHECK(g->dof(Component::x, 1, 0) == 0);
  CHECK(g->dof(Component::y, 0, 1) == g->n_dofs_x());
  CHECK(g->dof(Component::y, 2, 4) == -1);
  const Point p = g->node_position(Component::y, 2, 1);
  CHECK(p.x == doctest::Approx(2.5 * 0.25));
  CHECK(p.y == doctest::Approx(0.25));
}

TEST_CASE("grid rejects bad specs") {
  CHECK_THROWS_AS(make_grid({1, 4, 1.0, 1.0, {0.2, 0.8, 0.2, 0.8}}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({4, 4, 1.0, 1.0, {0.8, 0.2, 0.2, 0.8}}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid({4, 4, 1.0, 1.0, {0.2, 1.2, 0.2, 0.8}}), std::invalid_argument);
}

TEST_CASE("curl fields are discretely divergence free") {
  const auto g = fixture::small_grid(10);
  const VelocityField f = g->from_dofs(fixture::random_solenoidal(*g, 3));
  // Divergence by hand: flux differences over each cell.
  double worst = 0.0;
  for (int j = 0; j < g->ny(); ++j) {
    for (int i = 0; i < g->nx(); ++i) {
      const double d = (f.ux(i + 1, j) - f.ux(i, j)) / g->hx() + (f.uy(i, j + 1) - f.uy(i, j)) / g->hy();
      worst = std::max(worst, std::abs(d));
    }
  }
  CHECK(worst < 1e-11);
  CHECK(g->max_abs_divergence(f) < 1e-11);
  CHECK(g->satisfies_no_slip(f));
}

TEST_CASE("gradient is minus the divergence transpose") {
  const auto g = fixture::small_grid(7);
  const SpMat diff = SpMat(g->gradient()) + SpMat(g->divergence().transpose());
  CHECK(diff.norm() == 0.0);
}

TEST_CASE("negative laplacian is symmetric positive definite") {
  const auto g = fixture::small_grid(8);
  const SpMat& A = g->neg_laplacian();
  CHECK(SpMat(A - SpMat(A.transpose())).norm() == 0.0);
  const Vec x = fixture::random_vec(g->n_dofs(), 5);
  CHECK(x.dot(A * x) > 0.0);
  // Interior second difference of a quadratic in x is exact.
  VelocityField f = g->zero_velocity();
  for (int j = 0; j < g->ny(); ++j) {
    for (int i = 1; i < g->nx(); ++i) {
      const double xx = i * g->hx();
      f.ux(i, j) = xx * (1.0 - xx);
    }
  }
  const Vec Af = A * g->to_dofs(f);
  const int k = g->dof(Component::x, 4, 4);
  CHECK(Af[k] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("face quadrature integrates constants to the area") {
  const auto g = make_grid({5, 4, 2.0, 1.5, {0.5, 1.5, 0.5, 1.0}});
  double s = 0.0;
  for (int j = 0; j < g->ny(); ++j)
    for (int i = 0; i <= g->nx(); ++i) s += g->face_weight(Component::x, i, j);
  CHECK(s == doctest::Approx(3.0));
}

TEST_CASE("projection is idempotent and removes divergence") {
  const auto g = fixture::small_grid(9);
  const VelocityField f = g->from_dofs(fixture::random_vec(g->n_dofs(), 11));
  CHECK(g->max_abs_divergence(f) > 1.0);
  const VelocityField p = g->project(f);
  CHECK(g->max_abs_divergence(p) < 1e-10);
  const VelocityField pp = g->project(p);
  CHECK((g->to_dofs(pp) - g->to_dofs(p)).norm() < 1e-10 * g->to_dofs(p).norm());
  // Orthogonality of the removed part against solenoidal fields.
  VelocityField r = g->from_dofs(g->to_dofs(f) - g->to_dofs(p));
  const VelocityField s = g->from_dofs(fixture::random_solenoidal(*g, 4));
  CHECK(std::abs(g->inner(r, s)) < 1e-10 * std::sqrt(g->inner(r, r) * g->inner(s, s)));
}

TEST_CASE("pressure from a pure gradient residual") {
  const auto g = fixture::small_grid(8);
  Vec p = fixture::random_vec(g->n_cells(), 2);
  p.array() -= p.mean();
  const Vec res = g->gradient() * p;
  const PressureField q = g->pressure_from_residual(res);
  double worst = 0.0;
  for (int j = 0; j < g->ny(); ++j)
    for (int i = 0; i < g->nx(); ++i) worst = std::max(worst, std::abs(q.p(i, j) - p[i + g->nx() * j]));
  CHECK(worst < 1e-10);
}

TEST_CASE("omega nodes are sorted and inside the window") {
  const auto g = fixture::small_grid(12);
  for (Component c : kComponents) {
    const auto& nodes = g->omega_nodes(c);
    REQUIRE(!nodes.empty());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      CHECK(g->omega().contains(nodes[k].position));
      CHECK(nodes[k].dof == g->dof(c, nodes[k].i, nodes[k].j));
      if (k > 0) CHECK(nodes[k - 1].position < nodes[k].position);
    }
  }
}

TEST_CASE("atom spreading conserves mass and is the transpose of interpolation") {
  const auto g = fixture::small_grid(10);
  const Point x{0.4137, 0.5521};
  for (Component c : kComponents) {
    const VelocityField f = spread_atom(*g, x, 0.7, c);
    double mass = 0.0;
    for (double v : f[c].values()) mass += v * g->cell_area();
    CHECK(mass == doctest::Approx(0.7).epsilon(1e-13));
    const VelocityField h = g->from_dofs(fixture::random_vec(g->n_dofs(), 8));
    double lhs = 0.0;
    for (std::size_t k = 0; k < f[c].size(); ++k) lhs += f[c].values()[k] * h[c].values()[k] * g->cell_area();
    CHECK(lhs == doctest::Approx(0.7 * interpolate_field(*g, h, x, c)).epsilon(1e-13));
  }
}

TEST_CASE("stencil of a node is a single entry") {
  const auto g = fixture::small_grid(8);
  const auto& node = g->omega_nodes(Component::y).front();
  const auto st = g->stencil(node.position, Component::y);
  REQUIRE(st.size() == 1);
  CHECK(st[0].i == node.i);
  CHECK(st[0].j == node.j);
  CHECK(st[0].weight == 1.0);
}
