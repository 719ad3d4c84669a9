#pragma once

#include <cstddef>

#include "ciagrid/parallel.hpp"
#include "ciagrid/scarp_model.hpp"
#include "ciagrid/scarp_solve.hpp"

namespace ciagrid {

struct HeuristicConfig {
    std::size_t window = 8;  // decided frontier cells that distinguish labels
    std::size_t beam = 0;    // labels kept per step, 0 = unbounded
    Exec exec = Exec::parallel;
};

/// Sweeps the cells in grid order, extending labels (frontier modes, prefix
/// sums, cost) by every admissible mode of the entering cell. A decided cell
/// leaves the frontier once all its neighbours are decided. Labels agreeing
/// on the last `window` frontier modes and on the prefix sums are merged,
/// keeping the cheaper one. The prefix windows are enforced exactly; only
/// the objective is approximated.
///
/// With an unbounded beam and a window covering the whole frontier the sweep
/// is an exact dynamic program and the report is marked proven optimal (the
/// 1D case with window >= 1). Throws InfeasibleError if no label survives.
SolveReport prefix_heuristic(const ScarpInstance& inst, const HeuristicConfig& config = {});

} // namespace ciagrid
