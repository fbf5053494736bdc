#include "nsmc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <random>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nsmc {

ScalarAtomicMeasure::ScalarAtomicMeasure(std::vector<Atom> atoms, double prune_tol) {
  // Sorting on (position, weight) makes the merged sums independent of input order.
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
    if (a.position != b.position) return a.position < b.position;
    return a.weight < b.weight;
  });
  atoms_.reserve(atoms.size());
  for (std::size_t k = 0; k < atoms.size();) {
    Atom merged = atoms[k];
    std::size_t m = k + 1;
    for (; m < atoms.size() && atoms[m].position == merged.position; ++m) merged.weight += atoms[m].weight;
    if (std::abs(merged.weight) > prune_tol && merged.weight != 0.0) atoms_.push_back(merged);
    k = m;
  }
}

double ScalarAtomicMeasure::total_variation() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += std::abs(a.weight);
  return s;
}

ScalarAtomicMeasure ScalarAtomicMeasure::scaled(double a) const {
  std::vector<Atom> out(atoms_.begin(), atoms_.end());
  for (Atom& at : out) at.weight *= a;
  return ScalarAtomicMeasure(std::move(out));
}

ScalarAtomicMeasure ScalarAtomicMeasure::positive_part() const {
  std::vector<Atom> out;
  std::copy_if(atoms_.begin(), atoms_.end(), std::back_inserter(out), [](const Atom& a) { return a.weight > 0; });
  return ScalarAtomicMeasure(std::move(out));
}

ScalarAtomicMeasure ScalarAtomicMeasure::negative_part() const {
  std::vector<Atom> out;
  std::copy_if(atoms_.begin(), atoms_.end(), std::back_inserter(out), [](const Atom& a) { return a.weight < 0; });
  return ScalarAtomicMeasure(std::move(out));
}

ScalarAtomicMeasure axpy(double a, const ScalarAtomicMeasure& v, const ScalarAtomicMeasure& u, double prune_tol) {
  std::vector<Atom> all;
  all.reserve(v.size() + u.size());
  for (const Atom& at : v.atoms()) all.push_back({at.position, a * at.weight});
  all.insert(all.end(), u.atoms().begin(), u.atoms().end());
  return ScalarAtomicMeasure(std::move(all), prune_tol);
}

double tv_norm(const VectorAtomicMeasure& m) {
  return std::max(m.comp1.total_variation(), m.comp2.total_variation());
}

ControlTrajectory::ControlTrajectory(double horizon, std::vector<VectorAtomicMeasure> values)
    : horizon_(horizon), values_(std::move(values)) {
  if (!(horizon > 0.0)) throw std::invalid_argument("ControlTrajectory: horizon must be positive");
  if (values_.empty()) throw std::invalid_argument("ControlTrajectory: need at least one time step");
}

ControlTrajectory ControlTrajectory::zeros(int nt, double horizon) {
  if (nt < 1) throw std::invalid_argument("ControlTrajectory: nt must be positive");
  return ControlTrajectory(horizon, std::vector<VectorAtomicMeasure>(static_cast<std::size_t>(nt)));
}

bool ControlTrajectory::feasible(double gamma, double tol) const {
  return std::all_of(values_.begin(), values_.end(),
                     [&](const VectorAtomicMeasure& m) { return tv_norm(m) <= gamma + tol; });
}

double ControlTrajectory::max_tv_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, tv_norm(v));
  return m;
}

std::size_t ControlTrajectory::max_atoms(Component c) const {
  std::size_t m = 0;
  for (const auto& v : values_) m = std::max(m, v[c].size());
  return m;
}

std::size_t ControlTrajectory::total_atoms(Component c) const {
  std::size_t s = 0;
  for (const auto& v : values_) s += v[c].size();
  return s;
}

bool ControlTrajectory::is_zero() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const VectorAtomicMeasure& m) { return m.comp1.empty() && m.comp2.empty(); });
}

ControlTrajectory axpy(double a, const ControlTrajectory& v, const ControlTrajectory& u, double prune_tol) {
  if (v.nt() != u.nt()) {
    throw std::invalid_argument("axpy: mismatched number of time steps (" + std::to_string(v.nt()) + " vs " +
                                std::to_string(u.nt()) + ")");
  }
  std::vector<VectorAtomicMeasure> out(static_cast<std::size_t>(u.nt()));
  for (int n = 0; n < u.nt(); ++n) {
    out[n].comp1 = axpy(a, v[n].comp1, u[n].comp1, prune_tol);
    out[n].comp2 = axpy(a, v[n].comp2, u[n].comp2, prune_tol);
  }
  return ControlTrajectory(u.horizon(), std::move(out));
}

ControlTrajectory scaled(const ControlTrajectory& u, double a) {
  std::vector<VectorAtomicMeasure> out(u.values().begin(), u.values().end());
  for (auto& m : out) {
    m.comp1 = m.comp1.scaled(a);
    m.comp2 = m.comp2.scaled(a);
  }
  return ControlTrajectory(u.horizon(), std::move(out));
}

ControlTrajectory random_control(const Rect& window, int nt, double horizon, double gamma, int atoms,
                                 std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> ux(window.x0, window.x1), uy(window.y0, window.y1), uw(-1.0, 1.0),
      scale(0.1, 1.0);
  std::vector<VectorAtomicMeasure> values(static_cast<std::size_t>(nt));
  for (auto& m : values) {
    for (Component c : kComponents) {
      std::vector<Atom> list;
      double tv = 0.0;
      for (int k = 0; k < atoms; ++k) {
        Atom a{{ux(rng), uy(rng)}, uw(rng)};
        tv += std::abs(a.weight);
        list.push_back(a);
      }
      const double s = tv > 0.0 ? gamma * scale(rng) / tv : 0.0;
      for (Atom& a : list) a.weight *= s;
      m[c] = ScalarAtomicMeasure(std::move(list));
    }
  }
  return ControlTrajectory(horizon, std::move(values));
}

LebesgueDecomposition lebesgue_decompose(const ScalarAtomicMeasure& v, const ScalarAtomicMeasure& u) {
  LebesgueDecomposition out;
  out.density.assign(u.size(), 0.0);
  std::vector<Atom> singular;
  const auto ua = u.atoms();
  // Both atom lists are sorted by position: merge walk.
  std::size_t k = 0;
  for (const Atom& a : v.atoms()) {
    while (k < ua.size() && ua[k].position < a.position) ++k;
    if (k < ua.size() && ua[k].position == a.position) {
      out.density[k] = a.weight / std::abs(ua[k].weight);
    } else {
      singular.push_back(a);
    }
  }
  out.singular = ScalarAtomicMeasure(std::move(singular));
  return out;
}

double j_directional(const ScalarAtomicMeasure& u, const ScalarAtomicMeasure& v) {
  const LebesgueDecomposition d = lebesgue_decompose(v, u);
  double s = 0.0;
  const auto ua = u.atoms();
  for (std::size_t k = 0; k < ua.size(); ++k) s += d.density[k] * ua[k].weight;
  return s + d.singular.total_variation();
}

void write_control_csv(std::ostream& os, const ControlTrajectory& u) {
  os << "t_index,component,x,y,weight\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (int n = 0; n < u.nt(); ++n) {
    for (Component c : kComponents) {
      for (const Atom& a : u[n][c].atoms()) {
        line.str("");
        line << n << ',' << static_cast<int>(c) << ',' << a.position.x << ',' << a.position.y << ',' << a.weight
             << '\n';
        os << line.str();
      }
    }
  }
}

ControlTrajectory read_control_csv(std::istream& is, int nt, double horizon) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("t_index,component,x,y,weight", 0) != 0) {
    throw std::runtime_error("control csv: missing header 't_index,component,x,y,weight'");
  }
  std::vector<std::array<std::vector<Atom>, 2>> atoms(static_cast<std::size_t>(nt));
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::istringstream ss(line);
    std::string field;
    std::array<std::string, 5> f;
    for (auto& s : f) {
      if (!std::getline(ss, s, ',')) throw std::runtime_error("control csv: short row " + std::to_string(row));
    }
    try {
      const int n = std::stoi(f[0]);
      const int comp = std::stoi(f[1]);
      if (n < 0 || n >= nt) throw std::runtime_error("t_index out of range");
      if (comp != 1 && comp != 2) throw std::runtime_error("component must be 1 or 2");
      atoms[n][comp - 1].push_back({{std::stod(f[2]), std::stod(f[3])}, std::stod(f[4])});
    } catch (const std::exception& e) {
      throw std::runtime_error("control csv: bad row " + std::to_string(row) + ": " + e.what());
    }
  }
  std::vector<VectorAtomicMeasure> values(static_cast<std::size_t>(nt));
  for (int n = 0; n < nt; ++n) {
    values[n].comp1 = ScalarAtomicMeasure(std::move(atoms[n][0]));
    values[n].comp2 = ScalarAtomicMeasure(std::move(atoms[n][1]));
  }
  return ControlTrajectory(horizon, std::move(values));
}

}  // namespace nsmc
