#include "doctest.h"
#include "fixtures.hpp"
#include "nsmc/linearized.hpp"

using namespace nsmc;

namespace {

double l2q(const Grid& g, double dt, const std::vector<Vec>& a) {
  double s = 0.0;
  const int nt = static_cast<int>(a.size()) - 1;
  for (int n = 0; n <= nt; ++n) s += ((n == 0 || n == nt) ? 0.5 : 1.0) * a[n].squaredNorm();
  return std::sqrt(dt * g.cell_area() * s);
}

}  // namespace

TEST_CASE("linearized state is linear in the direction") {
  fixture::SmallProblem pb;
  const auto base = solve_state(*pb.grid, pb.params, pb.data.y0, {}, pb.reference);
  const auto v = random_control(pb.grid->omega(), pb.params.nt, 1.0, 1.0, 2, 5, 0);
  const auto z1 = solve_linearized(*pb.grid, pb.params, base, v);
  const auto z2 = solve_linearized(*pb.grid, pb.params, base, scaled(v, 2.0));
  CHECK(z1.y[0].norm() == 0.0);
  for (int n = 0; n <= pb.params.nt; ++n) CHECK((z2.y[n] - 2.0 * z1.y[n]).norm() <= 1e-11 * (1.0 + z2.y[n].norm()));
  for (int n = 0; n <= pb.params.nt; ++n) CHECK(pb.grid->max_abs_divergence(z1.velocity(*pb.grid, n)) <= 1e-10);
}

TEST_CASE("second derivative is symmetric") {
  fixture::SmallProblem pb;
  const auto base = solve_state(*pb.grid, pb.params, pb.data.y0, {}, pb.reference);
  const auto za = solve_linearized(*pb.grid, pb.params, base, random_control(pb.grid->omega(), 8, 1.0, 1.0, 2, 1, 0));
  const auto zb = solve_linearized(*pb.grid, pb.params, base, random_control(pb.grid->omega(), 8, 1.0, 1.0, 2, 1, 1));
  const auto ab = solve_second(*pb.grid, pb.params, base, za, zb);
  const auto ba = solve_second(*pb.grid, pb.params, base, zb, za);
  for (int n = 0; n <= pb.params.nt; ++n) CHECK(ab.y[n] == ba.y[n]);
}

TEST_CASE("Taylor remainders of the control-to-state map") {
  fixture::SmallProblem pb;
  const auto& g = *pb.grid;
  const auto base = solve_state(g, pb.params, pb.data.y0, {}, pb.reference);
  const auto v = random_control(g.omega(), pb.params.nt, 1.0, 1.0, 2, 7, 0);
  const auto z = solve_linearized(g, pb.params, base, v);
  const auto zz = solve_second(g, pb.params, base, z, z);
  std::vector<double> r1, r2;
  for (double s : {0.1, 0.05, 0.025}) {
    const auto y = solve_state(g, pb.params, pb.data.y0, {}, axpy(s, v, pb.reference));
    std::vector<Vec> d1, d2;
    for (int n = 0; n <= pb.params.nt; ++n) {
      d1.push_back(y.y[n] - base.y[n] - s * z.y[n]);
      d2.push_back(d1.back() - 0.5 * s * s * zz.y[n]);
    }
    r1.push_back(l2q(g, pb.params.dt(), d1));
    r2.push_back(l2q(g, pb.params.dt(), d2));
  }
  CHECK(std::log2(r1[1] / r1[2]) >= 1.9);
  CHECK(std::log2(r2[1] / r2[2]) >= 2.7);
}
