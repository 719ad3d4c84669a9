#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ciagrid/control.hpp"
#include "ciagrid/parallel.hpp"
#include "ciagrid/scarp_model.hpp"

namespace ciagrid {

enum class IncumbentSource { none, supplied, heuristic, search, enumeration };

std::string to_string(IncumbentSource s);

struct SolveReport {
    BinaryControl best;
    bool has_incumbent = false;
    Rational objective;  // primal bound; meaningful only with an incumbent
    Rational dual_bound;
    bool proven_optimal = false;
    std::uint64_t nodes = 0;
    IncumbentSource incumbent_source = IncumbentSource::none;
    double seconds = 0.0;
    /// Dual bound sampled during the search (non-decreasing).
    std::vector<Rational> dual_log;
    /// Largest decided-cell frontier seen by the prefix heuristic.
    std::size_t max_window = 0;

    /// (primal - dual) / dual; +inf when dual is zero and primal positive.
    double gap() const;
};

nlohmann::json report_to_json(const SolveReport& r);

/// Enumerates every assignment that respects the fixings, keeps the ones
/// satisfying all prefix windows, and returns the cheapest (first in
/// lexicographic mode order on ties). Throws SizeLimit if cells * modes > cap
/// and InfeasibleError if nothing is feasible.
SolveReport brute_force(const ScarpInstance& inst, std::size_t cap = 24, Exec exec = Exec::parallel);

/// All feasible assignments in lexicographic order (test oracle support).
std::vector<BinaryControl> enumerate_feasible(const ScarpInstance& inst, std::size_t cap = 24);

struct SolveConfig {
    std::uint64_t node_budget = 10'000'000;
    double time_budget_seconds = 60.0;
    /// Seed the search with the prefix heuristic when no incumbent is given.
    bool use_heuristic = true;
    std::size_t heuristic_window = 8;
    std::size_t heuristic_beam = 0;
    /// Valid inequalities enforced as hard constraints during the search.
    std::vector<Cut> cuts;
    /// Record the dual bound every this many nodes (0: never).
    std::uint64_t dual_log_every = 0;
};

/// Depth-first branch-and-bound over cell modes in grid order. Prunes on the
/// per-mode window relaxation, on the cuts, and on incurred switching cost.
SolveReport solve_exact(const ScarpInstance& inst, const std::optional<BinaryControl>& incumbent = std::nullopt,
                        const SolveConfig& config = {});

struct CutCheck {
    bool valid = true;
    std::optional<BinaryControl> violated_by;
};

/// Certifies a cut against every integer-feasible point (capped enumeration).
CutCheck check_cut(const ScarpInstance& inst, const Cut& cut, std::size_t cap = 24);

} // namespace ciagrid
