#include "ciagrid/refinement.hpp"

#include <algorithm>

namespace ciagrid {

RefinementResult refine_until(const ControlField& alpha, const Rational& tolerance, const Grid& grid0,
                              const RoundingAlgorithm& ra) {
    if (tolerance <= 0) {
        throw Error("refinement tolerance must be positive");
    }
    if (grid0.domain() != alpha.domain()) {
        throw Error("grid and control field live on different domains");
    }
    if (grid0.max_depth() > alpha.ref_depth()) {
        throw Error("initial grid is finer than the reference depth");
    }
    const std::int64_t tol_units = floor_to_i64(tolerance / alpha.unit());
    const std::size_t children = std::size_t{1} << grid0.dim();

    Grid grid = grid0;
    std::vector<std::int64_t> delta = nonbinariness_all(alpha, grid);
    std::vector<RefinementRecord> history;
    for (std::size_t k = 0;; ++k) {
        BinaryControl omega = ra(alpha, grid);
        const std::int64_t d = pseudometric_units(alpha, omega, grid);
        if (d <= tol_units) {
            return {std::move(grid), std::move(omega), alpha.to_measure(d), k, std::move(history)};
        }
        auto best = std::max_element(delta.begin(), delta.end());  // first maximum on ties
        const auto n_star = static_cast<std::size_t>(best - delta.begin());
        if (*best == 0) {
            throw RefinementStalled("alpha is binary on every cell but d = " + to_string(alpha.to_measure(d)) +
                                    " exceeds the tolerance");
        }
        if (grid.cell(n_star).depth >= alpha.ref_depth()) {
            throw DepthExhausted("cell " + std::to_string(n_star + 1) + " has non-binariness " +
                                 to_string(alpha.to_measure(*best)) + " at reference depth " +
                                 std::to_string(alpha.ref_depth()) + " while d = " +
                                 to_string(alpha.to_measure(d)) + " exceeds the tolerance");
        }
        history.push_back({k, n_star, alpha.to_measure(*best), alpha.to_measure(d), grid.size()});

        grid = split_cell(grid, n_star);
        std::vector<std::int64_t> child_delta(children);
        for (std::size_t c = 0; c < children; ++c) {
            child_delta[c] = nonbinariness_units(alpha, grid.cell(n_star + c));
        }
        delta.erase(delta.begin() + static_cast<std::ptrdiff_t>(n_star));
        delta.insert(delta.begin() + static_cast<std::ptrdiff_t>(n_star), child_delta.begin(), child_delta.end());
    }
}

int coarsest_uniform_depth(const ControlField& alpha, const Rational& tolerance, const RoundingAlgorithm& ra) {
    const std::int64_t tol_units = floor_to_i64(tolerance / alpha.unit());
    for (int j = 0; j <= alpha.ref_depth(); ++j) {
        Grid g = initial_grid(alpha.domain(), j);
        if (pseudometric_units(alpha, ra(alpha, g), g) <= tol_units) {
            return j;
        }
    }
    return -1;
}

} // namespace ciagrid
