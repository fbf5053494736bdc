#include "nsmc/io.hpp"

#include "json.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace nsmc {

namespace {

constexpr char kMagic[6] = {'N', 'S', 'M', 'C', '1', '\0'};

static_assert(std::endian::native == std::endian::little, "NSMC1 I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

using ordered_json = nlohmann::ordered_json;

ordered_json number_or_null(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void write_nsmc1(const std::filesystem::path& path, const FieldStack& stack) {
  if (stack.data.size() != stack.count * stack.rows * stack.cols) {
    throw std::runtime_error("write_nsmc1: payload size does not match the header");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof kMagic);
  put(os, stack.count);
  put(os, stack.rows);
  put(os, stack.cols);
  os.write(reinterpret_cast<const char*>(stack.data.data()),
           static_cast<std::streamsize>(stack.data.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

FieldStack read_nsmc1(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[sizeof kMagic];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw std::runtime_error("bad NSMC1 magic in " + path.string());
  FieldStack s;
  s.count = get<std::uint64_t>(is);
  s.rows = get<std::uint64_t>(is);
  s.cols = get<std::uint64_t>(is);
  if (!is) throw std::runtime_error("truncated NSMC1 header in " + path.string());
  const std::uint64_t n = s.count * s.rows * s.cols;
  if (s.rows != 0 && s.cols != 0 && n / s.rows / s.cols != s.count) {
    throw std::runtime_error("NSMC1 header overflow in " + path.string());
  }
  s.data.resize(n);
  is.read(reinterpret_cast<char*>(s.data.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw std::runtime_error("truncated NSMC1 payload in " + path.string());
  return s;
}

FieldStack stack_component(const Grid& grid, const std::vector<Vec>& dofs, Component c) {
  FieldStack s;
  s.count = dofs.size();
  const Array2D shape = grid.zero_velocity()[c];
  s.rows = static_cast<std::uint64_t>(shape.nj());
  s.cols = static_cast<std::uint64_t>(shape.ni());
  s.data.reserve(s.count * s.rows * s.cols);
  for (const Vec& y : dofs) {
    const VelocityField f = grid.from_dofs(y);
    const auto v = f[c].values();
    s.data.insert(s.data.end(), v.begin(), v.end());
  }
  return s;
}

FieldStack stack_pressure(const std::vector<PressureField>& p) {
  FieldStack s;
  s.count = p.size();
  if (!p.empty()) {
    s.rows = static_cast<std::uint64_t>(p.front().p.nj());
    s.cols = static_cast<std::uint64_t>(p.front().p.ni());
  }
  for (const PressureField& f : p) {
    const auto v = f.p.values();
    s.data.insert(s.data.end(), v.begin(), v.end());
  }
  return s;
}

namespace {

void fill(Array2D& a, const FieldStack& s, std::uint64_t n, const char* what) {
  if (s.rows != static_cast<std::uint64_t>(a.nj()) || s.cols != static_cast<std::uint64_t>(a.ni())) {
    throw std::runtime_error(std::string("NSMC1 ") + what + " stack does not match the grid");
  }
  const std::size_t size = a.size();
  std::copy_n(s.data.begin() + static_cast<std::ptrdiff_t>(n * size), size, a.values().begin());
}

}  // namespace

std::vector<VelocityField> unstack_velocity(const Grid& grid, const FieldStack& ux, const FieldStack& uy) {
  if (ux.count != uy.count) throw std::runtime_error("NSMC1 velocity stacks have different lengths");
  std::vector<VelocityField> out;
  for (std::uint64_t n = 0; n < ux.count; ++n) {
    VelocityField f = grid.zero_velocity();
    fill(f.ux, ux, n, "ux");
    fill(f.uy, uy, n, "uy");
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<PressureField> unstack_pressure(const FieldStack& p) {
  std::vector<PressureField> out;
  for (std::uint64_t n = 0; n < p.count; ++n) {
    PressureField f{Array2D(static_cast<int>(p.cols), static_cast<int>(p.rows))};
    fill(f.p, p, n, "p");
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<std::filesystem::path> write_fields(const std::filesystem::path& dir, const std::string& prefix,
                                                const Grid& grid, const std::vector<Vec>& velocity,
                                                const std::vector<PressureField>& pressure) {
  std::vector<std::filesystem::path> paths{dir / (prefix + "_ux.nsmc"), dir / (prefix + "_uy.nsmc"),
                                           dir / (prefix + "_p.nsmc")};
  write_nsmc1(paths[0], stack_component(grid, velocity, Component::x));
  write_nsmc1(paths[1], stack_component(grid, velocity, Component::y));
  write_nsmc1(paths[2], stack_pressure(pressure));
  return paths;
}

std::vector<VelocityField> read_velocity(const std::filesystem::path& dir, const std::string& prefix, const Grid& grid) {
  return unstack_velocity(grid, read_nsmc1(dir / (prefix + "_ux.nsmc")), read_nsmc1(dir / (prefix + "_uy.nsmc")));
}

void write_slice_csv(std::ostream& os, const Grid& grid, const VelocityField& field) {
  os << "component,i,j,x,y,value\n";
  for (Component c : kComponents) {
    const Array2D& a = field[c];
    for (int j = 0; j < a.nj(); ++j) {
      for (int i = 0; i < a.ni(); ++i) {
        const Point p = grid.node_position(c, i, j);
        os << static_cast<int>(c) << ',' << i << ',' << j << ',' << format_double(p.x) << ',' << format_double(p.y)
           << ',' << format_double(a(i, j)) << '\n';
      }
    }
  }
}

void write_psi_csv(std::ostream& os, const Grid& grid, const AdjointTrajectory& adj) {
  os << "t_index,t,psi_1,psi_2,argmax1_x,argmax1_y,argmax2_x,argmax2_y\n";
  for (int n = 0; n <= adj.nt(); ++n) {
    const SupNorm s1 = sup_norm_on_omega(grid, adj, n, Component::x);
    const SupNorm s2 = sup_norm_on_omega(grid, adj, n, Component::y);
    os << n << ',' << format_double(n * adj.dt) << ',' << format_double(s1.value) << ',' << format_double(s2.value)
       << ',' << format_double(s1.node.position.x) << ',' << format_double(s1.node.position.y) << ','
       << format_double(s2.node.position.x) << ',' << format_double(s2.node.position.y) << '\n';
  }
}

void write_iterate_csv(std::ostream& os, const IterateLog& log) {
  os << "iter,J,gap,step,atoms_c1,atoms_c2,seconds\n";
  for (const IterateEntry& e : log.entries) {
    os << e.iter << ',' << format_double(e.J) << ',' << format_double(e.gap) << ',' << format_double(e.step) << ','
       << e.atoms_c1 << ',' << e.atoms_c2 << ',' << format_double(e.seconds) << '\n';
  }
}

void write_energy_csv(std::ostream& os, const std::vector<double>& energy, double dt) {
  os << "t_index,t,energy\n";
  for (std::size_t n = 0; n < energy.size(); ++n) {
    os << n << ',' << format_double(static_cast<double>(n) * dt) << ',' << format_double(energy[n]) << '\n';
  }
}

void write_first_order_csv(std::ostream& os, const OptimalityReport& r) {
  os << "t_index,component,psi,tv,active,norm_gap,support_residual\n";
  for (const StepResidual& s : r.steps) {
    os << s.n << ',' << static_cast<int>(s.component) << ',' << format_double(s.psi) << ',' << format_double(s.tv)
       << ',' << (s.active ? 1 : 0) << ',' << format_double(s.norm_gap) << ',' << format_double(s.support_residual)
       << '\n';
  }
}

void write_growth_csv(std::ostream& os, const GrowthReport& r) {
  os << "index,distance,state_dist2,dJ,max_tv\n";
  for (const GrowthSample& s : r.samples) {
    os << s.index << ',' << format_double(s.distance) << ',' << format_double(s.state_dist2) << ','
       << format_double(s.dJ) << ',' << format_double(s.max_tv) << '\n';
  }
}

std::string first_order_json(const OptimalityReport& r) {
  ordered_json j;
  j["gamma"] = r.gamma;
  j["max_psi"] = r.max_psi;
  j["tol_psi"] = r.tol_psi;
  j["tol_psi_convention"] = "psi treated as zero when psi <= 1e-10 * max_psi";
  j["max_norm_gap"] = r.max_norm_gap;
  j["max_support_residual"] = r.max_support_residual;
  j["support_residual_rel"] = r.max_psi > 0.0 ? ordered_json(r.max_support_residual / r.max_psi) : ordered_json(nullptr);
  std::size_t active = 0;
  for (const StepResidual& s : r.steps) active += s.active ? 1 : 0;
  j["active_steps"] = active;
  j["steps"] = r.steps.size();
  return j.dump(2);
}

std::string growth_json(const GrowthReport& r) {
  ordered_json j;
  j["seed"] = r.seed;
  j["radius"] = r.radius;
  j["n_samples"] = r.samples.size();
  j["rejected"] = r.rejected;
  j["kappa"] = number_or_null(r.kappa);
  ordered_json rows = ordered_json::array();
  for (const GrowthSample& s : r.samples) {
    rows.push_back({{"index", s.index}, {"distance", s.distance}, {"state_dist2", s.state_dist2}, {"dJ", s.dJ}});
  }
  j["samples"] = rows;
  return j.dump(2);
}

std::string second_order_json(const SecondOrderScan& s) {
  ordered_json j;
  j["n_sampled"] = s.n_sampled;
  j["n_critical"] = s.n_critical;
  j["min_curvature"] = number_or_null(s.min_curvature);
  return j.dump(2);
}

}  // namespace nsmc
