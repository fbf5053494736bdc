#include "nsmc/optimality.hpp"

#include "nsmc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <random>

namespace nsmc {

namespace {

constexpr double kNormActiveTol = 1e-9;

bool norm_active(double tv, double gamma) { return std::abs(tv - gamma) <= kNormActiveTol * std::max(gamma, 1.0); }

double max_psi(const AdjointTrajectory& adj, int nt) {
  double m = 0.0;
  for (int n = 0; n < nt; ++n) m = std::max({m, adj.psi[n][0], adj.psi[n][1]});
  return m;
}

double field_value(const Grid& grid, const Vec& field, Point x, Component c) {
  double v = 0.0;
  for (const StencilEntry& e : grid.stencil(x, c)) {
    const int k = grid.dof(c, e.i, e.j);
    if (k >= 0) v += e.weight * field[k];
  }
  return v;
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::mt19937_64 make_rng(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

double state_norm2(const Grid& grid, double dt, const std::vector<Vec>& a, const std::vector<Vec>* b) {
  const int nt = static_cast<int>(a.size()) - 1;
  double s = 0.0;
  for (int n = 0; n <= nt; ++n) {
    const double e = b ? (a[n] - (*b)[n]).squaredNorm() : a[n].squaredNorm();
    s += trapezoid_weight(n, nt) * e;
  }
  return grid.cell_area() * dt * s;
}

ConeMembership cone_membership_with_z(const EvalRecord& record, const ControlTrajectory& v, const ConeOptions& opts,
                                      const StateTrajectory& z) {
  const Grid& grid = *record.grid;
  const ControlTrajectory& ub = record.control;
  const AdjointTrajectory& adj = record.adjoint;
  const int nt = record.params.nt;
  const double dt = record.params.dt();
  const double tol_psi = kPsiRelTol * max_psi(adj, nt);

  ConeMembership out;
  out.z_norm = std::sqrt(state_norm2(grid, dt, z.y, nullptr));
  double phi_scale = 0.0;
  for (int n = 0; n < nt; ++n) phi_scale = std::max(phi_scale, adj.phi[n].lpNorm<Eigen::Infinity>());
  const double v_scale = v.max_tv_norm();
  out.slack_j = opts.tol * v_scale;
  out.slack_L = opts.tol * v_scale * record.params.T * phi_scale;

  bool sign_ok = true;
  bool equal_ok = true;
  double lower = 0.0;
  out.max_active_j = -INFINITY;
  for (int n = 0; n < nt; ++n) {
    for (Component c : kComponents) {
      if (!norm_active(ub[n][c].total_variation(), opts.gamma)) continue;
      const double j = j_directional(ub[n][c], v[n][c]);
      out.max_active_j = std::max(out.max_active_j, j);
      if (j > out.slack_j) sign_ok = false;
      const double psi = adj.psi[n][index_of(c)];
      const double psi_eff = psi > tol_psi ? psi : 0.0;
      if (psi_eff > 0.0) {
        out.max_abs_j_psi = std::max(out.max_abs_j_psi, std::abs(j));
        if (std::abs(j) > out.slack_j) equal_ok = false;
      }
      const double a = dt * psi_eff;
      out.weighted_j += a * j;
      lower += a * out.slack_j;
    }
  }
  if (out.max_active_j == -INFINITY) out.max_active_j = 0.0;
  out.lagrangian = lagrangian_derivative(record, ub, v);
  const double tz = opts.tau * out.z_norm;
  out.in_C = sign_ok && equal_ok && std::abs(out.lagrangian) <= out.slack_L;
  out.in_C_tau = sign_ok && out.weighted_j >= -(tz + lower) && out.lagrangian <= tz + out.slack_L;
  return out;
}

}  // namespace

OptimalityReport check_first_order(const Grid& grid, const ControlTrajectory& u, const AdjointTrajectory& adj,
                                   double gamma) {
  const int nt = u.nt();
  if (adj.nt() != nt) throw std::invalid_argument("check_first_order: adjoint and control lengths differ");
  OptimalityReport r;
  r.gamma = gamma;
  r.max_psi = max_psi(adj, nt);
  r.tol_psi = kPsiRelTol * r.max_psi;
  for (int n = 0; n < nt; ++n) {
    for (Component c : kComponents) {
      StepResidual s;
      s.n = n;
      s.component = c;
      s.psi = adj.psi[n][index_of(c)];
      s.tv = u[n][c].total_variation();
      s.active = s.psi > r.tol_psi;
      s.norm_gap = s.active ? std::abs(s.tv - gamma) : 0.0;
      for (const Atom& a : u[n][c].atoms()) {
        const double phi = field_value(grid, adj.phi[n], a.position, c);
        s.support_residual = std::max(s.support_residual, std::abs(phi + sign(a.weight) * s.psi));
      }
      r.max_norm_gap = std::max(r.max_norm_gap, s.norm_gap);
      r.max_support_residual = std::max(r.max_support_residual, s.support_residual);
      r.steps.push_back(s);
    }
  }
  return r;
}

ConeMembership cone_membership(const EvalRecord& record, const ControlTrajectory& v, const ConeOptions& opts) {
  const StateTrajectory z = solve_linearized(*record.grid, record.params, record.state, v);
  return cone_membership_with_z(record, v, opts, z);
}

ControlTrajectory sample_critical_direction(const EvalRecord& record, std::uint64_t seed, int index,
                                            const ConeOptions& opts) {
  const Grid& grid = *record.grid;
  const ControlTrajectory& ub = record.control;
  const AdjointTrajectory& adj = record.adjoint;
  const int nt = record.params.nt;
  const double tol_psi = kPsiRelTol * max_psi(adj, nt);
  auto rng = make_rng(seed, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<VectorAtomicMeasure> values(static_cast<std::size_t>(nt));
  for (int n = 0; n < nt; ++n) {
    for (Component c : kComponents) {
      const auto base = ub[n][c].atoms();
      const double psi = adj.psi[n][index_of(c)];
      const auto& nodes = grid.omega_nodes(c);
      auto in_support = [&](Point p) {
        return std::any_of(base.begin(), base.end(), [&](const Atom& a) { return a.position == p; });
      };

      std::vector<Atom> singular;
      if (unif(rng) < 0.5) {
        if (psi > tol_psi) {
          // Singular mass only on the exact argmax set, with the sign that
          // makes <v_s, phi> + psi |v_s| vanish.
          std::vector<const OmegaNode*> argmax;
          for (const OmegaNode& node : nodes) {
            if (std::abs(adj.phi[n][node.dof]) == psi && !in_support(node.position)) argmax.push_back(&node);
          }
          if (!argmax.empty()) {
            const OmegaNode& node = *argmax[static_cast<std::size_t>(unif(rng) * argmax.size()) % argmax.size()];
            singular.push_back({node.position, -sign(adj.phi[n][node.dof]) * unif(rng)});
          }
        } else if (!nodes.empty()) {
          const OmegaNode& node = nodes[static_cast<std::size_t>(unif(rng) * nodes.size()) % nodes.size()];
          if (!in_support(node.position)) singular.push_back({node.position, normal(rng)});
        }
      }

      std::vector<double> g(base.size());
      for (double& x : g) x = normal(rng);
      const double tv = ub[n][c].total_variation();
      if (norm_active(tv, opts.gamma)) {
        if (base.empty()) {
          singular.clear();
        } else {
          double target = 0.0;
          if (psi <= tol_psi && unif(rng) < 0.5) target = -std::abs(normal(rng));
          double js = 0.0;
          for (std::size_t k = 0; k < base.size(); ++k) js += g[k] * base[k].weight;
          double vs = 0.0;
          for (const Atom& a : singular) vs += std::abs(a.weight);
          const double shift = (target - (js + vs)) / tv;
          for (std::size_t k = 0; k < base.size(); ++k) g[k] += shift * sign(base[k].weight);
        }
      }
      std::vector<Atom> atoms = singular;
      for (std::size_t k = 0; k < base.size(); ++k) atoms.push_back({base[k].position, g[k] * std::abs(base[k].weight)});
      values[n][c] = ScalarAtomicMeasure(std::move(atoms));
    }
  }
  return ControlTrajectory(record.params.T, std::move(values));
}

SecondOrderScan second_order_necessary_scan(const EvalRecord& record, int n_dirs, std::uint64_t seed,
                                            const ConeOptions& opts) {
  SecondOrderScan scan;
  scan.n_sampled = std::max(n_dirs, 0);
  std::vector<std::optional<double>> curv(static_cast<std::size_t>(scan.n_sampled));
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < scan.n_sampled; ++k) {
    try {
      const ControlTrajectory v = sample_critical_direction(record, seed, k, opts);
      const StateTrajectory z = solve_linearized(*record.grid, record.params, record.state, v);
      if (cone_membership_with_z(record, v, opts, z).in_C) curv[k] = curvature_form(record, z);
    } catch (...) {
#pragma omp critical
      error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  for (const auto& q : curv) {
    if (!q) continue;
    ++scan.n_critical;
    scan.curvatures.push_back(*q);
    scan.min_curvature = scan.min_curvature ? std::min(*scan.min_curvature, *q) : *q;
  }
  return scan;
}

double forcing_distance(const Grid& grid, const ControlTrajectory& a, const ControlTrajectory& b) {
  if (a.nt() != b.nt()) throw std::invalid_argument("forcing_distance: mismatched number of steps");
  double s = 0.0;
  for (int n = 0; n < a.nt(); ++n) s += (control_forcing(grid, a[n]) - control_forcing(grid, b[n])).squaredNorm();
  return std::sqrt(grid.cell_area() * a.dt() * s);
}

ControlTrajectory growth_perturbation(const Grid& grid, const ControlTrajectory& u_bar, double gamma, double radius,
                                      std::uint64_t seed, int index) {
  auto rng = make_rng(seed, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> step(-1, 1);

  std::array<std::map<std::pair<int, int>, Point>, 2> lattice;
  for (Component c : kComponents) {
    for (const OmegaNode& node : grid.omega_nodes(c)) lattice[index_of(c)][{node.i, node.j}] = node.position;
  }
  const double hx = grid.hx();
  const double hy = grid.hy();

  std::vector<VectorAtomicMeasure> values(u_bar.values().begin(), u_bar.values().end());
  for (int n = 0; n < u_bar.nt(); ++n) {
    for (Component c : kComponents) {
      const auto& lat = lattice[index_of(c)];
      std::vector<Atom> atoms;
      for (const Atom& a : u_bar[n][c].atoms()) {
        Atom b = a;
        if (unif(rng) < 0.5) {
          const double ox = c == Component::x ? 0.0 : 0.5;
          const double oy = c == Component::x ? 0.5 : 0.0;
          const int i = static_cast<int>(std::lround(a.position.x / hx - ox)) + step(rng);
          const int j = static_cast<int>(std::lround(a.position.y / hy - oy)) + step(rng);
          if (auto it = lat.find({i, j}); it != lat.end()) b.position = it->second;
        }
        b.weight *= 1.0 + 0.2 * normal(rng);
        atoms.push_back(b);
      }
      if (!lat.empty() && unif(rng) < 0.25) {
        auto it = lat.begin();
        std::advance(it, static_cast<long>(unif(rng) * lat.size()) % static_cast<long>(lat.size()));
        atoms.push_back({it->second, 0.1 * std::max(gamma, 0.0) * normal(rng)});
      }
      ScalarAtomicMeasure m(std::move(atoms));
      const double tv = m.total_variation();
      if (tv > gamma) m = m.scaled(gamma / tv);
      values[n][c] = std::move(m);
    }
  }
  ControlTrajectory u(u_bar.horizon(), std::move(values));
  const double d = forcing_distance(grid, u, u_bar);
  if (d > radius) {
    const double t = radius / d;
    u = axpy(t, u, scaled(u_bar, 1.0 - t));
  }
  return u;
}

GrowthReport quadratic_growth_probe(const EvalRecord& record, int n_samples, double radius, double gamma,
                                    std::uint64_t seed) {
  const Grid& grid = *record.grid;
  const ProblemData& data = *record.data;
  GrowthReport rep;
  rep.seed = seed;
  rep.radius = radius;
  const int count = std::max(n_samples, 0);
  std::vector<std::optional<GrowthSample>> out(static_cast<std::size_t>(count));
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    try {
      const ControlTrajectory u = growth_perturbation(grid, record.control, gamma, radius, seed, k);
      if (!u.feasible(gamma)) continue;
      const StateTrajectory st = solve_state(grid, record.params, data.y0, data.f0, u);
      GrowthSample s;
      s.index = k;
      s.distance = forcing_distance(grid, u, record.control);
      s.state_dist2 = state_norm2(grid, record.params.dt(), st.y, &record.state.y);
      s.dJ = tracking_value(grid, record.params, st, data.y_d) - record.j_value;
      s.max_tv = u.max_tv_norm();
      out[k] = s;
    } catch (...) {
#pragma omp critical
      error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  for (const auto& s : out) {
    if (!s) {
      ++rep.rejected;
      continue;
    }
    rep.samples.push_back(*s);
    if (s->state_dist2 > 0.0) {
      const double k = 2.0 * s->dJ / s->state_dist2;
      rep.kappa = rep.kappa ? std::min(*rep.kappa, k) : k;
    }
  }
  return rep;
}

}  // namespace nsmc
