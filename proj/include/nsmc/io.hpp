#pragma once

/// @file io.hpp
/// @brief Artifact formats: NSMC1 binary field stacks, CSV tables and JSON reports.
///
/// NSMC1 layout: magic "NSMC1\0", little-endian u64 (count, rows, cols), then
/// count*rows*cols little-endian float64 values, snapshot-major, each snapshot
/// row-major (rows indexed by j).

#include "nsmc/adjoint.hpp"
#include "nsmc/optimality.hpp"
#include "nsmc/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nsmc {

struct FieldStack {
  std::uint64_t count = 0;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<double> data;
  bool operator==(const FieldStack&) const = default;
};

/// Throws std::runtime_error on I/O failure.
void write_nsmc1(const std::filesystem::path& path, const FieldStack& stack);
/// Throws std::runtime_error on I/O failure, bad magic or truncated payload.
FieldStack read_nsmc1(const std::filesystem::path& path);

FieldStack stack_component(const Grid& grid, const std::vector<Vec>& dofs, Component c);
FieldStack stack_pressure(const std::vector<PressureField>& p);
/// Inverse of stack_component for both components; boundary faces keep their values.
std::vector<VelocityField> unstack_velocity(const Grid& grid, const FieldStack& ux, const FieldStack& uy);
std::vector<PressureField> unstack_pressure(const FieldStack& p);

/// Writes <prefix>_ux.nsmc, <prefix>_uy.nsmc and <prefix>_p.nsmc; returns the paths.
std::vector<std::filesystem::path> write_fields(const std::filesystem::path& dir, const std::string& prefix,
                                                const Grid& grid, const std::vector<Vec>& velocity,
                                                const std::vector<PressureField>& pressure);
/// Velocity snapshots stored under <prefix>_ux/_uy.
std::vector<VelocityField> read_velocity(const std::filesystem::path& dir, const std::string& prefix, const Grid& grid);

/// Snapshot slice for plotting: `component,i,j,x,y,value`.
void write_slice_csv(std::ostream& os, const Grid& grid, const VelocityField& field);
/// `t_index,t,psi_1,psi_2,argmax1_x,argmax1_y,argmax2_x,argmax2_y`.
void write_psi_csv(std::ostream& os, const Grid& grid, const AdjointTrajectory& adj);
/// `iter,J,gap,step,atoms_c1,atoms_c2,seconds`.
void write_iterate_csv(std::ostream& os, const IterateLog& log);
/// `t_index,t,energy`.
void write_energy_csv(std::ostream& os, const std::vector<double>& energy, double dt);
/// `t_index,component,psi,tv,active,norm_gap,support_residual`.
void write_first_order_csv(std::ostream& os, const OptimalityReport& r);
/// `index,distance,state_dist2,dJ,max_tv`.
void write_growth_csv(std::ostream& os, const GrowthReport& r);

/// JSON text with stable key order.
std::string first_order_json(const OptimalityReport& r);
std::string growth_json(const GrowthReport& r);
std::string second_order_json(const SecondOrderScan& s);

/// 17 significant digits.
std::string format_double(double x);

}  // namespace nsmc
