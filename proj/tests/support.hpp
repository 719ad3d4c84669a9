#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ciagrid/control.hpp"
#include "ciagrid/grid.hpp"
#include "ciagrid/refinement.hpp"
#include "ciagrid/scarp_model.hpp"
#include "ciagrid/synthetic.hpp"

namespace support {

using namespace ciagrid;

inline Rational q(const std::string& s) { return parse_rational(s); }

/// Field on [0,1]^dim with the same row in every reference cell.
inline ControlField constant_field(int dim, int ref_depth, const std::vector<std::string>& row) {
    std::vector<Rational> r;
    for (const auto& s : row) {
        r.push_back(q(s));
    }
    const std::size_t R = std::size_t{1} << (dim * ref_depth);
    return ControlField(Domain::unit_box(dim), static_cast<int>(row.size()), ref_depth,
                        std::vector<std::vector<Rational>>(R, r));
}

/// Field on [0,1]^dim from explicit Z-order rows.
inline ControlField field(int dim, int ref_depth, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::vector<Rational>> v;
    for (const auto& row : rows) {
        std::vector<Rational> r;
        for (const auto& s : row) {
            r.push_back(q(s));
        }
        v.push_back(r);
    }
    return ControlField(Domain::unit_box(dim), static_cast<int>(rows.at(0).size()), ref_depth, v);
}

/// 1D grid with the given depths left to right (must tile [0,1]).
inline Grid grid_1d(const std::vector<int>& depths) {
    std::vector<Cell> cells;
    std::uint64_t pos = 0;  // in units of 2^-30
    for (int d : depths) {
        Cell c;
        c.depth = d;
        c.index[0] = pos >> (30 - d);
        cells.push_back(c);
        pos += std::uint64_t{1} << (30 - d);
    }
    return Grid(Domain::unit_box(1), cells);
}

// Two modes on cells with the given k; windows for mode 0 as given, mode 1
// the complement so that the one-hot rows are consistent.
inline ScarpInstance manual(const std::vector<int>& k, const std::vector<std::int64_t>& lo0,
                     const std::vector<std::int64_t>& up0) {
    ScarpInstance inst;
    inst.cells = k.size();
    inst.modes = 2;
    inst.j_max = *std::max_element(k.begin(), k.end());
    inst.k = k;
    std::int64_t total = 0;
    std::vector<std::int64_t> lo1, up1;
    for (std::size_t i = 0; i < k.size(); ++i) {
        inst.weight.push_back(std::int64_t{1} << k[i]);
        total += inst.weight.back();
        lo1.push_back(total - up0[i]);
        up1.push_back(total - lo0[i]);
    }
    inst.lower = lo0;
    inst.lower.insert(inst.lower.end(), lo1.begin(), lo1.end());
    inst.upper = up0;
    inst.upper.insert(inst.upper.end(), up1.begin(), up1.end());
    inst.mode_weights = {Rational(1), Rational(1)};
    inst.fixed.assign(k.size(), -1);
    inst.validate();
    return inst;
}

inline std::vector<double> point2(const std::vector<double>& mode0) {
    std::vector<double> p;
    for (double v : mode0) {
        p.push_back(v);
        p.push_back(1.0 - v);
    }
    return p;
}

struct SmallCase {
    std::string label;
    ControlField alpha;
    Grid grid;
    Rational delta;
    ScarpInstance inst;
};

/// Seeded small feasible instance with cells * modes <= cap. Alternates
/// 1D/2D and uniform/random/adaptive grids; the tolerance is drawn between
/// the SUR distance and a few grid units above it so windows are tight but
/// nonempty. Returns nullopt when the draw is infeasible or too large.
inline std::optional<SmallCase> small_case(std::uint64_t seed, std::size_t cap = 24) {
    std::mt19937_64 rng(seed);
    const int dim = seed % 2 == 0 ? 1 : 2;
    const int M = 2 + static_cast<int>((seed / 2) % 2);
    const int L = dim == 1 ? 4 : 2;
    const int kind = static_cast<int>((seed / 4) % 3);  // uniform, random, adaptive
    const ControlField alpha = random_field(dim, M, L, 4, 0.3, rng);
    const std::size_t max_cells = cap / static_cast<std::size_t>(M);

    Grid grid = initial_grid(alpha.domain(), 0);
    Rational delta;
    std::string label = std::to_string(dim) + "d_M" + std::to_string(M) + "_";
    const Rational vol = alpha.domain().volume();
    if (kind == 0) {
        int depth = dim == 1 ? 3 : 1;
        while (depth > 0 && (std::size_t{1} << (dim * depth)) > max_cells) {
            --depth;
        }
        grid = initial_grid(alpha.domain(), depth);
        label += "uniform";
    } else if (kind == 1) {
        grid = random_grid(alpha.domain(), L, max_cells, rng);
        label += "random";
    } else {
        const Rational tol = vol * ratio(1, std::uniform_int_distribution<int>(3, 6)(rng));
        try {
            grid = refine_until(alpha, tol, initial_grid(alpha.domain(), 0)).grid;
        } catch (const Error&) {
            return std::nullopt;
        }
        if (grid.size() > max_cells) {
            return std::nullopt;
        }
        label += "adaptive";
    }
    const Rational d_sur = pseudometric(alpha, sur_variant(alpha, grid), grid);
    const Rational step = vol * pow2(-dim * grid.max_depth());
    delta = d_sur + step * ratio(std::uniform_int_distribution<int>(0, 3)(rng), 2);
    if (delta <= 0) {
        delta = step / 2;
    }
    try {
        ScarpInstance inst = build_instance(alpha, grid, delta, {}, seed % 3 != 0);
        return SmallCase{label + "_s" + std::to_string(seed), alpha, grid, delta, std::move(inst)};
    } catch (const InfeasibleError&) {
        return std::nullopt;
    }
}

} // namespace support
