#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

#include "ciagrid/parallel.hpp"
#include "ciagrid/rational.hpp"

namespace ciagrid {

inline constexpr int kMaxDim = 3;
inline constexpr int kMaxMortonBits = 60;

/// Axis-aligned box [origin, origin + lengths].
struct Domain {
    int dim = 1;
    std::vector<Rational> origin;
    std::vector<Rational> lengths;

    static Domain unit_box(int dim);

    /// Throws Error unless 1 <= dim <= kMaxDim and every length is positive.
    void validate() const;
    Rational volume() const;

    friend bool operator==(const Domain&, const Domain&) = default;
};

using CellIndex = std::array<std::uint64_t, kMaxDim>;

/// Dyadic cell: `depth` bisections of the root box along every axis.
struct Cell {
    int depth = 0;
    CellIndex index{};

    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Interleaves the index bits of `cell` (axis 0 least significant) into its
/// Z-order code among the cells of the same depth.
std::uint64_t morton_code(const Cell& cell, int dim);
Cell cell_from_morton(std::uint64_t code, int depth, int dim);

/// Ordered dyadic rounding grid. Values are immutable; every refinement
/// returns a new grid.
class Grid {
public:
    Grid(Domain domain, std::vector<Cell> cells, std::size_t generation = 0);

    const Domain& domain() const { return domain_; }
    int dim() const { return domain_.dim; }
    std::size_t size() const { return cells_.size(); }
    const std::vector<Cell>& cells() const { return cells_; }
    const Cell& cell(std::size_t n) const { return cells_[n]; }
    std::size_t generation() const { return generation_; }

    Rational volume(std::size_t n) const;
    /// j with volume(n) = 2^-j * domain volume.
    int volume_exponent(std::size_t n) const { return dim() * cells_[n].depth; }
    int max_depth() const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Domain domain_;
    std::vector<Cell> cells_;
    std::size_t generation_ = 0;
};

/// Uniform grid of 2^(d*depth0) cells in Z-order.
Grid initial_grid(const Domain& domain, int depth0);

/// Replaces cell n (0-based) in place by its 2^d children in Z-order.
Grid split_cell(const Grid& grid, std::size_t n);

struct AdjacentPair {
    std::size_t i = 0;
    std::size_t j = 0;
    Rational interface;

    friend bool operator==(const AdjacentPair&, const AdjacentPair&) = default;
};

/// Facet-adjacent cell pairs, i < j, sorted lexicographically.
struct Adjacency {
    std::vector<AdjacentPair> pairs;

    friend bool operator==(const Adjacency&, const Adjacency&) = default;
};

/// Neighbour lookup through a per-depth cell index; O(N d depth).
Adjacency adjacency(const Grid& grid, Exec exec = Exec::parallel);

/// All-pairs facet overlap test; O(N^2). Serial reference for adjacency().
Adjacency adjacency_reference(const Grid& grid);

/// Adjacency of split_cell(before, n) derived from the adjacency of `before`.
Adjacency update_adjacency_after_split(const Adjacency& adj, const Grid& before, std::size_t n,
                                       const Grid& after);

/// Shared facet measure of two cells of the same domain, if they share a
/// facet of positive (d-1)-measure. In 1D a shared endpoint counts as 1.
std::optional<Rational> facet_interface(const Domain& domain, const Cell& a, const Cell& b);

/// Smallest cell volume; every cell volume is an integer multiple of it.
Rational verify_admissible(const Grid& grid);
std::vector<std::int64_t> volume_multiples(const Grid& grid);

/// lambda(T) / lambda(B) for a cell T and its circumscribed ball B. Every
/// dyadic cell is similar to the root box, so this is a single constant.
double regularity_constant(const Domain& domain);
double regularity_constant(const Domain& domain, const Cell& cell);

nlohmann::json grid_to_json(const Grid& grid);
Grid grid_from_json(const nlohmann::json& j);
nlohmann::json domain_to_json(const Domain& domain);
Domain domain_from_json(const nlohmann::json& j);

} // namespace ciagrid
