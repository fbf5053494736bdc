#pragma once

/// @file config.hpp
/// @brief INI run configuration, problem assembly and run manifests.

#include "nsmc/objective.hpp"
#include "nsmc/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsmc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field source: "zero", "file:<prefix>" (NSMC1 stacks <prefix>_ux/_uy.nsmc),
/// "reference" (state of the [reference] control) or "mms".
struct FieldSource {
  std::string kind = "zero";
  std::filesystem::path path;
};

struct RunConfig {
  std::filesystem::path source;  ///< config file, empty when built in code
  GridSpec grid{32, 32, 1.0, 1.0, {0.25, 0.75, 0.25, 0.75}};
  SolverParams solver;
  double gamma = 1.0;
  FieldSource y0;
  FieldSource f0;
  FieldSource y_d{"reference", {}};
  FieldSource control;  ///< initial control: zero or file:<csv>
  double mms_amplitude = 0.5;
  /// Constant-in-time reference control, one entry per atom.
  std::vector<std::pair<Component, Atom>> reference_atoms;
  CgmConfig optimizer;
  double tau = 1e-2;
  int n_dirs = 20;
  int probe_samples = 100;
  double probe_radius = 0.25;
  std::filesystem::path out = "run";
  std::uint64_t seed = 1;
  int threads = 0;  ///< 0: OpenMP default
  int checkpoint_every = 0;

  /// Throws ConfigError.
  void validate() const;
};

/// Parses an INI file. Relative file sources resolve against its directory.
/// Throws ConfigError naming the offending key or path.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::istream& is, const std::filesystem::path& base_dir = {});

/// Canonical INI text of a config (round-trips through parse_config).
std::string config_to_ini(const RunConfig& cfg);

ControlTrajectory reference_control(const RunConfig& cfg);

/// Loads or synthesizes y0, f0 and y_d. Throws ConfigError for unreadable files
/// and SolverError when the reference state fails.
ProblemData build_problem(const RunConfig& cfg, const Grid& grid);

ControlTrajectory initial_control(const RunConfig& cfg);

/// CRC-32 of a file's bytes.
std::uint32_t file_crc32(const std::filesystem::path& path);

/// Writes manifest.json and config.cfg into dir. `artifacts` are checksummed;
/// `extra` entries are copied into a "results" object verbatim (JSON text).
void write_manifest(const std::filesystem::path& dir, const RunConfig& cfg, const std::string& command,
                    const std::vector<std::filesystem::path>& artifacts,
                    const std::map<std::string, std::string>& extra = {});

}  // namespace nsmc
