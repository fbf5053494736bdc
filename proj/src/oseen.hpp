#pragma once

#include "nsmc/ns_forward.hpp"
#include "step_system.hpp"

#include <functional>

namespace nsmc::detail {

/// Marches z^{n+1} = C M_n^{-1} C^T (z^n/dt + g(n)) with M_n = C^T E_n C and
/// E_n = I/dt + nu*A + N'(base^{n+1}), starting from z^0 = 0.
StateTrajectory march_linearized(const Grid& grid, const SolverParams& params, const StateTrajectory& base,
                                 const std::function<Vec(int)>& forcing);

}  // namespace nsmc::detail
