#include "nsmc/adjoint.hpp"
#include "nsmc/kernels.hpp"
#include "nsmc/optimizer.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace nsmc;

namespace {

std::shared_ptr<const Grid> grid_of(int n) { return make_grid({n, n, 1.0, 1.0, {0.25, 0.75, 0.25, 0.75}}); }

Vec random_vec(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Vec v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

template <auto Kernel>
void BM_convect(benchmark::State& state) {
  const auto g = grid_of(static_cast<int>(state.range(0)));
  const Vec w = random_vec(g->n_dofs(), 1), y = random_vec(g->n_dofs(), 2);
  Vec out(g->n_dofs());
  for (auto _ : state) {
    Kernel(g->convection(), w, y, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Kernel>
void BM_jacobian_transpose(benchmark::State& state) {
  const auto g = grid_of(static_cast<int>(state.range(0)));
  const Vec w = random_vec(g->n_dofs(), 1), y = random_vec(g->n_dofs(), 2);
  Vec out(g->n_dofs());
  for (auto _ : state) {
    Kernel(g->convection(), w, y, out);
    benchmark::DoNotOptimize(out.data());
  }
}

AdjointTrajectory random_adjoint(const Grid& g, int nt) {
  AdjointTrajectory adj;
  adj.dt = 1.0 / nt;
  for (int n = 0; n <= nt; ++n) adj.phi.push_back(random_vec(g.n_dofs(), 10 + n));
  return adj;
}

template <bool Parallel>
void BM_lmo(benchmark::State& state) {
  const auto g = grid_of(static_cast<int>(state.range(0)));
  const AdjointTrajectory adj = random_adjoint(*g, 64);
  for (auto _ : state) {
    ControlTrajectory v = Parallel ? lmo(*g, adj, 1.0) : serial::lmo(*g, adj, 1.0);
    benchmark::DoNotOptimize(&v);
  }
}

std::span<const double> in(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> io(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

void serial_convect(const ConvectionTensor& t, const Vec& w, const Vec& y, Vec& o) { kernels::serial::convect(t, in(w), in(y), io(o)); }
void omp_convect(const ConvectionTensor& t, const Vec& w, const Vec& y, Vec& o) { kernels::omp::convect(t, in(w), in(y), io(o)); }
void serial_jt(const ConvectionTensor& t, const Vec& w, const Vec& y, Vec& o) {
  kernels::serial::convect_jacobian_transpose(t, in(w), in(y), io(o));
}
void omp_jt(const ConvectionTensor& t, const Vec& w, const Vec& y, Vec& o) {
  kernels::omp::convect_jacobian_transpose(t, in(w), in(y), io(o));
}

}  // namespace

BENCHMARK(BM_convect<serial_convect>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_convect<omp_convect>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_jacobian_transpose<serial_jt>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_jacobian_transpose<omp_jt>)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_lmo<false>)->Arg(32)->Arg(64);
BENCHMARK(BM_lmo<true>)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
