#include "nsmc/config.hpp"

#include "nsmc/io.hpp"
#include "nsmc/manufactured.hpp"

#include "json.hpp"

#include <Eigen/Core>
#include <boost/crc.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <boost/version.hpp>

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace nsmc {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> kKeys = {
    {"grid", {"nx", "ny", "lx", "ly", "omega"}},
    {"solver", {"nu", "T", "nt", "picard_max", "picard_tol", "eps_div", "linear_tol", "doc_p", "doc_q"}},
    {"problem", {"gamma", "y0", "f0", "y_d", "control", "mms_amplitude"}},
    {"reference", {"atoms"}},
    {"optimizer", {"max_iter", "step_rule", "armijo_c", "armijo_shrink", "min_step", "stop_tol", "prune_tol"}},
    {"check", {"tau", "n_dirs"}},
    {"probe", {"n_samples", "radius"}},
    {"run", {"out", "seed", "threads", "checkpoint_every"}},
};

template <class T>
void read(const pt::ptree& tree, const std::string& key, T& target) {
  const auto v = tree.get_optional<std::string>(key);
  if (!v) return;
  std::istringstream is(*v);
  T parsed{};
  is >> parsed;
  if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("config: cannot parse " + key + " = '" + *v + "'");
  target = parsed;
}

FieldSource parse_source(const std::string& key, const std::string& text, const std::filesystem::path& base,
                         std::initializer_list<const char*> allowed) {
  FieldSource s;
  if (text.rfind("file:", 0) == 0) {
    s.kind = "file";
    s.path = text.substr(5);
    if (s.path.empty()) throw ConfigError("config: " + key + " names an empty file");
    if (s.path.is_relative() && !base.empty()) s.path = base / s.path;
  } else {
    s.kind = text;
  }
  for (const char* a : allowed) {
    if (s.kind == a) return s;
  }
  throw ConfigError("config: unsupported source " + key + " = '" + text + "'");
}

std::string source_text(const FieldSource& s) { return s.kind == "file" ? "file:" + s.path.string() : s.kind; }

std::vector<std::pair<Component, Atom>> parse_atoms(const std::string& text) {
  std::vector<std::pair<Component, Atom>> out;
  std::istringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream is(item);
    int c = 0;
    Atom a;
    is >> c >> a.position.x >> a.position.y >> a.weight;
    if (is.fail() || !(is >> std::ws).eof() || (c != 1 && c != 2)) {
      throw ConfigError("config: reference.atoms entry '" + item + "' is not 'component x y weight'");
    }
    out.push_back({static_cast<Component>(c), a});
  }
  return out;
}

void check_exists(const FieldSource& s, const std::string& key, bool csv) {
  if (s.kind != "file") return;
  const std::vector<std::filesystem::path> paths =
      csv ? std::vector<std::filesystem::path>{s.path}
          : std::vector<std::filesystem::path>{s.path.string() + "_ux.nsmc", s.path.string() + "_uy.nsmc"};
  for (const auto& p : paths) {
    if (!std::filesystem::exists(p)) throw ConfigError("config: " + key + " file not found: " + p.string());
  }
}

std::vector<VelocityField> load_stack(const FieldSource& s, const Grid& grid, const std::string& key) {
  check_exists(s, key, false);
  try {
    return unstack_velocity(grid, read_nsmc1(s.path.string() + "_ux.nsmc"), read_nsmc1(s.path.string() + "_uy.nsmc"));
  } catch (const std::runtime_error& e) {
    throw ConfigError("config: " + key + ": " + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  if (grid.nx < 4 || grid.ny < 4) throw ConfigError("config: grid.nx and grid.ny must be at least 4");
  if (!(grid.lx > 0.0 && grid.ly > 0.0)) throw ConfigError("config: grid.lx and grid.ly must be positive");
  const Rect& w = grid.omega;
  if (!(0.0 <= w.x0 && w.x0 < w.x1 && w.x1 <= grid.lx && 0.0 <= w.y0 && w.y0 < w.y1 && w.y1 <= grid.ly)) {
    throw ConfigError("config: grid.omega must be a nonempty rectangle inside the domain");
  }
  try {
    solver.validate();
    optimizer.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(gamma > 0.0)) throw ConfigError("config: problem.gamma must be positive");
  if (optimizer.gamma != gamma) throw ConfigError("config: optimizer gamma differs from problem.gamma");
  if (!(tau > 0.0)) throw ConfigError("config: check.tau must be positive");
  if (n_dirs < 0) throw ConfigError("config: check.n_dirs must be nonnegative");
  if (probe_samples < 0) throw ConfigError("config: probe.n_samples must be nonnegative");
  if (!(probe_radius > 0.0)) throw ConfigError("config: probe.radius must be positive");
  if (threads < 0) throw ConfigError("config: run.threads must be nonnegative");
  if (checkpoint_every < 0) throw ConfigError("config: run.checkpoint_every must be nonnegative");
  if (y_d.kind == "reference" && reference_atoms.empty()) {
    throw ConfigError("config: problem.y_d = reference needs [reference] atoms");
  }
  if ((y_d.kind == "mms") != (f0.kind == "mms") || (y_d.kind == "mms") != (y0.kind == "mms")) {
    throw ConfigError("config: the mms recipe must be selected for y0, f0 and y_d together");
  }
  for (const auto& [c, a] : reference_atoms) {
    if (!grid.omega.contains(a.position)) throw ConfigError("config: reference atom outside omega");
  }
  check_exists(y0, "problem.y0", false);
  check_exists(f0, "problem.f0", false);
  check_exists(y_d, "problem.y_d", false);
  check_exists(control, "problem.control", true);
}

RunConfig parse_config(std::istream& is, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = kKeys.find(section);
    if (it == kKeys.end()) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("config: unknown key " + section + "." + key);
    }
  }

  RunConfig cfg;
  read(tree, "grid.nx", cfg.grid.nx);
  read(tree, "grid.ny", cfg.grid.ny);
  read(tree, "grid.lx", cfg.grid.lx);
  read(tree, "grid.ly", cfg.grid.ly);
  if (const auto w = tree.get_optional<std::string>("grid.omega")) {
    std::istringstream ws(*w);
    Rect& r = cfg.grid.omega;
    ws >> r.x0 >> r.x1 >> r.y0 >> r.y1;
    if (ws.fail() || !(ws >> std::ws).eof()) throw ConfigError("config: grid.omega must be 'x0 x1 y0 y1'");
  }

  SolverParams& s = cfg.solver;
  read(tree, "solver.nu", s.nu);
  read(tree, "solver.T", s.T);
  read(tree, "solver.nt", s.nt);
  read(tree, "solver.picard_max", s.picard_max);
  read(tree, "solver.picard_tol", s.picard_tol);
  read(tree, "solver.eps_div", s.eps_div);
  read(tree, "solver.linear_tol", s.linear_tol);
  if (tree.get_optional<std::string>("solver.doc_p")) {
    double p = 0.0;
    read(tree, "solver.doc_p", p);
    s.doc_p = p;
  }
  if (tree.get_optional<std::string>("solver.doc_q")) {
    double q = 0.0;
    read(tree, "solver.doc_q", q);
    s.doc_q = q;
  }

  read(tree, "problem.gamma", cfg.gamma);
  read(tree, "problem.mms_amplitude", cfg.mms_amplitude);
  cfg.y0 = parse_source("problem.y0", tree.get("problem.y0", "zero"), base_dir, {"zero", "file", "mms"});
  cfg.f0 = parse_source("problem.f0", tree.get("problem.f0", "zero"), base_dir, {"zero", "file", "mms"});
  cfg.y_d = parse_source("problem.y_d", tree.get("problem.y_d", "reference"), base_dir, {"reference", "file", "mms"});
  cfg.control = parse_source("problem.control", tree.get("problem.control", "zero"), base_dir, {"zero", "file"});
  cfg.reference_atoms = parse_atoms(tree.get("reference.atoms", ""));

  CgmConfig& o = cfg.optimizer;
  o.gamma = cfg.gamma;
  read(tree, "optimizer.max_iter", o.max_iter);
  read(tree, "optimizer.armijo_c", o.armijo_c);
  read(tree, "optimizer.armijo_shrink", o.armijo_shrink);
  read(tree, "optimizer.min_step", o.min_step);
  read(tree, "optimizer.stop_tol", o.stop_tol);
  read(tree, "optimizer.prune_tol", o.prune_tol);
  const std::string rule = tree.get("optimizer.step_rule", "armijo");
  if (rule == "armijo") {
    o.step_rule = StepRule::armijo;
  } else if (rule == "harmonic") {
    o.step_rule = StepRule::harmonic;
  } else {
    throw ConfigError("config: optimizer.step_rule must be armijo or harmonic");
  }

  read(tree, "check.tau", cfg.tau);
  read(tree, "check.n_dirs", cfg.n_dirs);
  read(tree, "probe.n_samples", cfg.probe_samples);
  read(tree, "probe.radius", cfg.probe_radius);
  cfg.out = tree.get("run.out", cfg.out.string());
  read(tree, "run.seed", cfg.seed);
  read(tree, "run.threads", cfg.threads);
  read(tree, "run.checkpoint_every", cfg.checkpoint_every);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path.string());
  RunConfig cfg = parse_config(is, path.parent_path());
  cfg.source = path;
  cfg.validate();
  return cfg;
}

std::string config_to_ini(const RunConfig& cfg) {
  auto d = format_double;
  std::ostringstream os;
  const Rect& w = cfg.grid.omega;
  os << "[grid]\nnx = " << cfg.grid.nx << "\nny = " << cfg.grid.ny << "\nlx = " << d(cfg.grid.lx)
     << "\nly = " << d(cfg.grid.ly) << "\nomega = " << d(w.x0) << ' ' << d(w.x1) << ' ' << d(w.y0) << ' ' << d(w.y1)
     << "\n\n";
  const SolverParams& s = cfg.solver;
  os << "[solver]\nnu = " << d(s.nu) << "\nT = " << d(s.T) << "\nnt = " << s.nt << "\npicard_max = " << s.picard_max
     << "\npicard_tol = " << d(s.picard_tol) << "\neps_div = " << d(s.eps_div) << "\nlinear_tol = " << d(s.linear_tol)
     << '\n';
  if (s.doc_p) os << "doc_p = " << d(*s.doc_p) << '\n';
  if (s.doc_q) os << "doc_q = " << d(*s.doc_q) << '\n';
  os << "\n[problem]\ngamma = " << d(cfg.gamma) << "\ny0 = " << source_text(cfg.y0) << "\nf0 = " << source_text(cfg.f0)
     << "\ny_d = " << source_text(cfg.y_d) << "\ncontrol = " << source_text(cfg.control)
     << "\nmms_amplitude = " << d(cfg.mms_amplitude) << "\n\n";
  os << "[reference]\natoms = ";
  for (std::size_t k = 0; k < cfg.reference_atoms.size(); ++k) {
    const auto& [c, a] = cfg.reference_atoms[k];
    os << (k ? "; " : "") << static_cast<int>(c) << ' ' << d(a.position.x) << ' ' << d(a.position.y) << ' '
       << d(a.weight);
  }
  const CgmConfig& o = cfg.optimizer;
  os << "\n\n[optimizer]\nmax_iter = " << o.max_iter
     << "\nstep_rule = " << (o.step_rule == StepRule::armijo ? "armijo" : "harmonic") << "\narmijo_c = " << d(o.armijo_c)
     << "\narmijo_shrink = " << d(o.armijo_shrink) << "\nmin_step = " << d(o.min_step) << "\nstop_tol = "
     << d(o.stop_tol) << "\nprune_tol = " << d(o.prune_tol) << "\n\n";
  os << "[check]\ntau = " << d(cfg.tau) << "\nn_dirs = " << cfg.n_dirs << "\n\n";
  os << "[probe]\nn_samples = " << cfg.probe_samples << "\nradius = " << d(cfg.probe_radius) << "\n\n";
  os << "[run]\nout = " << cfg.out.string() << "\nseed = " << cfg.seed << "\nthreads = " << cfg.threads
     << "\ncheckpoint_every = " << cfg.checkpoint_every << '\n';
  return os.str();
}

ControlTrajectory reference_control(const RunConfig& cfg) {
  VectorAtomicMeasure m;
  std::vector<Atom> c1, c2;
  for (const auto& [c, a] : cfg.reference_atoms) (c == Component::x ? c1 : c2).push_back(a);
  m.comp1 = ScalarAtomicMeasure(std::move(c1));
  m.comp2 = ScalarAtomicMeasure(std::move(c2));
  return ControlTrajectory(cfg.solver.T, std::vector<VectorAtomicMeasure>(static_cast<std::size_t>(cfg.solver.nt), m));
}

ProblemData build_problem(const RunConfig& cfg, const Grid& grid) {
  ProblemData data;
  const int nt = cfg.solver.nt;
  if (cfg.y0.kind == "mms") {
    const ManufacturedCase mc = manufactured_spatial(grid, cfg.solver, cfg.mms_amplitude);
    data.y0 = mc.y0;
    data.f0 = mc.f0;
    for (const Vec& e : mc.exact) data.y_d.push_back(grid.from_dofs(e));
    return data;
  }

  if (cfg.y0.kind == "file") {
    data.y0 = load_stack(cfg.y0, grid, "problem.y0").at(0);
  } else {
    data.y0 = grid.zero_velocity();
  }
  if (cfg.f0.kind == "file") {
    const auto f = load_stack(cfg.f0, grid, "problem.f0");
    if (static_cast<int>(f.size()) != nt) throw ConfigError("config: problem.f0 must hold nt snapshots");
    for (const auto& v : f) data.f0.push_back(grid.to_dofs(v));
  }
  if (cfg.y_d.kind == "file") {
    data.y_d = load_stack(cfg.y_d, grid, "problem.y_d");
    if (static_cast<int>(data.y_d.size()) != nt + 1) throw ConfigError("config: problem.y_d must hold nt+1 snapshots");
  } else {
    const StateTrajectory ref = solve_state(grid, cfg.solver, data.y0, data.f0, reference_control(cfg));
    for (int n = 0; n <= nt; ++n) data.y_d.push_back(ref.velocity(grid, n));
  }
  return data;
}

ControlTrajectory initial_control(const RunConfig& cfg) {
  if (cfg.control.kind != "file") return ControlTrajectory::zeros(cfg.solver.nt, cfg.solver.T);
  std::ifstream is(cfg.control.path);
  if (!is) throw ConfigError("config: problem.control file not found: " + cfg.control.path.string());
  try {
    return read_control_csv(is, cfg.solver.nt, cfg.solver.T);
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("config: problem.control: ") + e.what());
  }
}

std::uint32_t file_crc32(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  boost::crc_32_type crc;
  char buf[1 << 16];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) crc.process_bytes(buf, static_cast<std::size_t>(is.gcount()));
  return crc.checksum();
}

void write_manifest(const std::filesystem::path& dir, const RunConfig& cfg, const std::string& command,
                    const std::vector<std::filesystem::path>& artifacts, const std::map<std::string, std::string>& extra) {
  {
    std::ofstream os(dir / "config.cfg");
    os << config_to_ini(cfg);
  }
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_file"] = "config.cfg";
  j["config_crc32"] = file_crc32(dir / "config.cfg");
  j["seed"] = cfg.seed;
  j["derived"] = {{"dt", cfg.solver.dt()},
                  {"hx", cfg.grid.lx / cfg.grid.nx},
                  {"hy", cfg.grid.ly / cfg.grid.ny},
                  {"n_dofs", (cfg.grid.nx - 1) * cfg.grid.ny + cfg.grid.nx * (cfg.grid.ny - 1)}};
  if (cfg.solver.doc_p) j["derived"]["doc_p"] = *cfg.solver.doc_p;
  if (cfg.solver.doc_q) j["derived"]["doc_q"] = *cfg.solver.doc_q;
  std::ostringstream compiler;
#if defined(__clang__)
  compiler << "clang " << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
  compiler << "gcc " << __GNUC__ << '.' << __GNUC_MINOR__;
#endif
  j["versions"] = {{"nsmc", "1.0.0"},
                   {"compiler", compiler.str()},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"boost", BOOST_LIB_VERSION},
                   {"openmp", _OPENMP}};
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const auto& p : artifacts) {
    std::ostringstream hex;
    hex << std::hex << std::setw(8) << std::setfill('0') << file_crc32(p);
    files[std::filesystem::relative(p, dir).generic_string()] = hex.str();
  }
  j["checksums_crc32"] = files;
  if (!extra.empty()) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (const auto& [k, v] : extra) r[k] = nlohmann::ordered_json::parse(v);
    j["results"] = r;
  }
  std::ofstream os(dir / "manifest.json");
  os << j.dump(2) << '\n';
}

}  // namespace nsmc
