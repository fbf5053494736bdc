#include "doctest.h"
#include "fixtures.hpp"
#include "nsmc/kernels.hpp"

#include <omp.h>

using namespace nsmc;

namespace {

std::span<const double> in(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> out(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

TEST_CASE("serial and parallel kernels agree bitwise") {
  const auto g = fixture::small_grid(16);
  const auto& t = g->convection();
  const Vec a = fixture::random_vec(g->n_dofs(), 1), b = fixture::random_vec(g->n_dofs(), 2);
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    Vec s(g->n_dofs()), p(g->n_dofs());
    kernels::serial::convect(t, in(a), in(b), out(s));
    kernels::omp::convect(t, in(a), in(b), out(p));
    CHECK(s == p);
    kernels::serial::convect_jacobian(t, in(a), in(b), out(s));
    kernels::omp::convect_jacobian(t, in(a), in(b), out(p));
    CHECK(s == p);
    kernels::serial::convect_jacobian_transpose(t, in(a), in(b), out(s));
    kernels::omp::convect_jacobian_transpose(t, in(a), in(b), out(p));
    CHECK(s == p);
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("jacobian is the derivative of the quadratic convection") {
  const auto g = fixture::small_grid(10);
  const auto& t = g->convection();
  const Vec y = fixture::random_vec(g->n_dofs(), 3), z = fixture::random_vec(g->n_dofs(), 4);
  Vec nyz, nzy, jac;
  kernels::convect(t, y, z, nyz);
  kernels::convect(t, z, y, nzy);
  kernels::convect_jacobian(t, y, z, jac);
  CHECK((jac - nyz - nzy).norm() <= 1e-13 * jac.norm());
}

TEST_CASE("jacobian transpose is the adjoint") {
  const auto g = fixture::small_grid(10);
  const auto& t = g->convection();
  const Vec y = fixture::random_vec(g->n_dofs(), 5), z = fixture::random_vec(g->n_dofs(), 6),
            x = fixture::random_vec(g->n_dofs(), 7);
  Vec jz, jtx;
  kernels::convect_jacobian(t, y, z, jz);
  kernels::convect_jacobian_transpose(t, y, x, jtx);
  CHECK(x.dot(jz) == doctest::Approx(z.dot(jtx)).epsilon(1e-12));
}

TEST_CASE("convection by a solenoidal field is skew symmetric") {
  const auto g = fixture::small_grid(12);
  const Vec w = fixture::random_solenoidal(*g, 8);
  const Vec y = fixture::random_vec(g->n_dofs(), 9);
  Vec ny;
  kernels::convect(g->convection(), w, y, ny);
  CHECK(std::abs(y.dot(ny)) <= 1e-12 * ny.norm() * y.norm());
}

TEST_CASE("abs_argmax returns the first strict maximum") {
  const std::vector<double> v{0.5, -3.0, 3.0, 1.0};
  const std::vector<int> idx{0, 1, 2, 3};
  const auto r = kernels::abs_argmax(v, idx);
  CHECK(r.position == 1);
  CHECK(r.value == 3.0);
  const std::vector<double> zeros(4, 0.0);
  CHECK(kernels::abs_argmax(zeros, idx).position == 0);
  const std::vector<int> sub{3, 0};
  CHECK(kernels::abs_argmax(v, sub).position == 0);
}

TEST_CASE("backend switch keeps results") {
  const auto g = fixture::small_grid(8);
  const Vec a = fixture::random_vec(g->n_dofs(), 1), b = fixture::random_vec(g->n_dofs(), 2);
  Vec s, p;
  kernels::set_backend(kernels::Backend::serial);
  kernels::convect(g->convection(), a, b, s);
  kernels::set_backend(kernels::Backend::omp);
  kernels::convect(g->convection(), a, b, p);
  CHECK(kernels::backend() == kernels::Backend::omp);
  CHECK(s == p);
}
