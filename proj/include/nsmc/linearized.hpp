#pragma once

/// @file linearized.hpp
/// @brief First and second derivatives of the discrete control-to-state map.

#include "nsmc/ns_forward.hpp"

namespace nsmc {

/// z = G'(u) v: the forward scheme linearized at `base`, with z(0) = 0.
StateTrajectory solve_linearized(const Grid& grid, const SolverParams& params, const StateTrajectory& base,
                                 const ControlTrajectory& v);

/// G''(u)(v1, v2) from z1 = G'(u) v1 and z2 = G'(u) v2. Symmetric in (z1, z2).
StateTrajectory solve_second(const Grid& grid, const SolverParams& params, const StateTrajectory& base,
                             const StateTrajectory& z1, const StateTrajectory& z2);

}  // namespace nsmc
