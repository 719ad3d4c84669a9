#include "ciagrid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "ciagrid/json_io.hpp"

namespace ciagrid {

Domain Domain::unit_box(int dim) {
    Domain d;
    d.dim = dim;
    d.origin.assign(static_cast<std::size_t>(dim), Rational(0));
    d.lengths.assign(static_cast<std::size_t>(dim), Rational(1));
    return d;
}

void Domain::validate() const {
    if (dim < 1 || dim > kMaxDim) {
        throw Error("domain dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    }
    if (origin.size() != static_cast<std::size_t>(dim) ||
        lengths.size() != static_cast<std::size_t>(dim)) {
        throw Error("domain origin/lengths must have dim entries");
    }
    for (const auto& l : lengths) {
        if (l <= 0) {
            throw Error("domain lengths must be positive");
        }
    }
}

Rational Domain::volume() const {
    Rational v = 1;
    for (const auto& l : lengths) {
        v *= l;
    }
    return v;
}

std::uint64_t morton_code(const Cell& cell, int dim) {
    std::uint64_t code = 0;
    for (int b = 0; b < cell.depth; ++b) {
        for (int a = 0; a < dim; ++a) {
            std::uint64_t bit = (cell.index[static_cast<std::size_t>(a)] >> b) & 1U;
            code |= bit << (b * dim + a);
        }
    }
    return code;
}

Cell cell_from_morton(std::uint64_t code, int depth, int dim) {
    Cell c;
    c.depth = depth;
    for (int b = 0; b < depth; ++b) {
        for (int a = 0; a < dim; ++a) {
            std::uint64_t bit = (code >> (b * dim + a)) & 1U;
            c.index[static_cast<std::size_t>(a)] |= bit << b;
        }
    }
    return c;
}

Grid::Grid(Domain domain, std::vector<Cell> cells, std::size_t generation)
    : domain_(std::move(domain)), cells_(std::move(cells)), generation_(generation) {
    domain_.validate();
    for (const auto& c : cells_) {
        if (c.depth < 0 || c.depth * domain_.dim > kMaxMortonBits) {
            throw Error("cell depth out of range");
        }
        for (int a = 0; a < kMaxDim; ++a) {
            std::uint64_t limit = a < domain_.dim ? (std::uint64_t{1} << c.depth) : 1;
            if (c.index[static_cast<std::size_t>(a)] >= limit) {
                throw Error("cell index out of range for its depth");
            }
        }
    }
}

Rational Grid::volume(std::size_t n) const {
    return domain_.volume() * pow2(-volume_exponent(n));
}

int Grid::max_depth() const {
    int m = 0;
    for (const auto& c : cells_) {
        m = std::max(m, c.depth);
    }
    return m;
}

Grid initial_grid(const Domain& domain, int depth0) {
    domain.validate();
    if (depth0 < 0 || depth0 * domain.dim > kMaxMortonBits) {
        throw Error("initial depth out of range");
    }
    std::uint64_t count = std::uint64_t{1} << (depth0 * domain.dim);
    std::vector<Cell> cells;
    cells.reserve(count);
    for (std::uint64_t code = 0; code < count; ++code) {
        cells.push_back(cell_from_morton(code, depth0, domain.dim));
    }
    return Grid(domain, std::move(cells), 0);
}

Grid split_cell(const Grid& grid, std::size_t n) {
    if (n >= grid.size()) {
        throw Error("split_cell: index " + std::to_string(n) + " out of range");
    }
    const int d = grid.dim();
    const Cell& parent = grid.cell(n);
    if ((parent.depth + 1) * d > kMaxMortonBits) {
        throw Error("split_cell: maximum depth reached");
    }
    std::vector<Cell> cells;
    cells.reserve(grid.size() + (std::size_t{1} << d) - 1);
    cells.insert(cells.end(), grid.cells().begin(), grid.cells().begin() + static_cast<std::ptrdiff_t>(n));
    for (unsigned offset = 0; offset < (1U << d); ++offset) {
        Cell child;
        child.depth = parent.depth + 1;
        for (int a = 0; a < d; ++a) {
            child.index[static_cast<std::size_t>(a)] =
                2 * parent.index[static_cast<std::size_t>(a)] + ((offset >> a) & 1U);
        }
        cells.push_back(child);
    }
    cells.insert(cells.end(), grid.cells().begin() + static_cast<std::ptrdiff_t>(n) + 1, grid.cells().end());
    return Grid(grid.domain(), std::move(cells), grid.generation() + 1);
}

namespace {

Rational interface_at_depth(const Domain& domain, int normal_axis, int depth) {
    if (domain.dim == 1) {
        return Rational(1);
    }
    Rational m = 1;
    for (int b = 0; b < domain.dim; ++b) {
        if (b != normal_axis) {
            m *= domain.lengths[static_cast<std::size_t>(b)];
        }
    }
    return m * pow2(-(domain.dim - 1) * depth);
}

void sort_pairs(Adjacency& adj) {
    std::sort(adj.pairs.begin(), adj.pairs.end(), [](const AdjacentPair& x, const AdjacentPair& y) {
        return x.i != y.i ? x.i < y.i : x.j < y.j;
    });
}

} // namespace

std::optional<Rational> facet_interface(const Domain& domain, const Cell& a, const Cell& b) {
    const int d = domain.dim;
    const int fine = std::max(a.depth, b.depth);
    int normal = -1;
    Rational measure = 1;
    for (int ax = 0; ax < d; ++ax) {
        auto axs = static_cast<std::size_t>(ax);
        std::uint64_t alo = a.index[axs] << (fine - a.depth);
        std::uint64_t ahi = (a.index[axs] + 1) << (fine - a.depth);
        std::uint64_t blo = b.index[axs] << (fine - b.depth);
        std::uint64_t bhi = (b.index[axs] + 1) << (fine - b.depth);
        std::uint64_t lo = std::max(alo, blo);
        std::uint64_t hi = std::min(ahi, bhi);
        if (lo == hi) {
            if (normal >= 0) {
                return std::nullopt;  // touch along two axes: edge/corner contact
            }
            normal = ax;
        } else if (lo > hi) {
            return std::nullopt;
        } else {
            measure *= Rational(mpz_class(std::to_string(hi - lo))) * domain.lengths[axs];
        }
    }
    if (normal < 0) {
        return std::nullopt;  // overlapping cells, not a facet
    }
    if (d == 1) {
        return Rational(1);
    }
    return measure * pow2(-(d - 1) * fine);
}

Adjacency adjacency_reference(const Grid& grid) {
    Adjacency adj;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            if (auto m = facet_interface(grid.domain(), grid.cell(i), grid.cell(j))) {
                adj.pairs.push_back({i, j, *m});
            }
        }
    }
    return adj;
}

Adjacency adjacency(const Grid& grid, Exec exec) {
    const int d = grid.dim();
    const int max_depth = grid.max_depth();
    std::vector<std::unordered_map<std::uint64_t, std::size_t>> by_depth(
        static_cast<std::size_t>(max_depth) + 1);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const Cell& c = grid.cell(n);
        by_depth[static_cast<std::size_t>(c.depth)].emplace(morton_code(c, d), n);
    }

    const auto count = static_cast<std::ptrdiff_t>(grid.size());
    std::vector<std::vector<AdjacentPair>> found(grid.size());
    auto visit = [&](std::ptrdiff_t n) {
        const Cell& c = grid.cell(static_cast<std::size_t>(n));
        const std::uint64_t extent = std::uint64_t{1} << c.depth;
        for (int a = 0; a < d; ++a) {
            for (int dir : {-1, +1}) {
                const auto as = static_cast<std::size_t>(a);
                if ((dir < 0 && c.index[as] == 0) || (dir > 0 && c.index[as] + 1 == extent)) {
                    continue;
                }
                Cell probe = c;
                probe.index[as] = dir > 0 ? c.index[as] + 1 : c.index[as] - 1;
                // The neighbour region is covered either by one leaf at this
                // depth or coarser, or by finer leaves that will find us.
                for (int t = c.depth; t >= 0; --t) {
                    Cell anc;
                    anc.depth = t;
                    for (int b = 0; b < d; ++b) {
                        anc.index[static_cast<std::size_t>(b)] = probe.index[static_cast<std::size_t>(b)] >> (c.depth - t);
                    }
                    const auto& level = by_depth[static_cast<std::size_t>(t)];
                    auto it = level.find(morton_code(anc, d));
                    if (it == level.end()) {
                        continue;
                    }
                    if (t < c.depth || dir > 0) {
                        std::size_t other = it->second;
                        auto lo = std::min<std::size_t>(static_cast<std::size_t>(n), other);
                        auto hi = std::max<std::size_t>(static_cast<std::size_t>(n), other);
                        found[static_cast<std::size_t>(n)].push_back(
                            {lo, hi, interface_at_depth(grid.domain(), a, c.depth)});
                    }
                    break;
                }
            }
        }
    };

    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 64) num_threads(thread_cap())
        for (std::ptrdiff_t n = 0; n < count; ++n) {
            visit(n);
        }
    } else {
        for (std::ptrdiff_t n = 0; n < count; ++n) {
            visit(n);
        }
    }

    Adjacency adj;
    for (auto& v : found) {
        for (auto& p : v) {
            adj.pairs.push_back(std::move(p));
        }
    }
    sort_pairs(adj);
    return adj;
}

Adjacency update_adjacency_after_split(const Adjacency& adj, const Grid& before, std::size_t n,
                                       const Grid& after) {
    const std::size_t children = std::size_t{1} << before.dim();
    if (after.size() != before.size() + children - 1) {
        throw Error("update_adjacency_after_split: grids do not differ by one split");
    }
    auto remap = [&](std::size_t i) { return i < n ? i : i + children - 1; };

    Adjacency out;
    std::vector<std::size_t> former_neighbours;
    for (const auto& p : adj.pairs) {
        if (p.i == n || p.j == n) {
            former_neighbours.push_back(p.i == n ? p.j : p.i);
            continue;
        }
        out.pairs.push_back({remap(p.i), remap(p.j), p.interface});
    }
    for (std::size_t c = n; c < n + children; ++c) {
        for (std::size_t c2 = c + 1; c2 < n + children; ++c2) {
            if (auto m = facet_interface(after.domain(), after.cell(c), after.cell(c2))) {
                out.pairs.push_back({c, c2, *m});
            }
        }
        for (std::size_t k : former_neighbours) {
            std::size_t kk = remap(k);
            if (auto m = facet_interface(after.domain(), after.cell(c), after.cell(kk))) {
                out.pairs.push_back({std::min(c, kk), std::max(c, kk), *m});
            }
        }
    }
    sort_pairs(out);
    return out;
}

Rational verify_admissible(const Grid& grid) {
    Rational vol_min = grid.domain().volume() * pow2(-grid.dim() * grid.max_depth());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        Rational ratio = grid.volume(n) / vol_min;
        if (ratio.get_den() != 1 || ratio < 1) {
            throw Error("grid violates the integer-multiple volume property");
        }
    }
    return vol_min;
}

std::vector<std::int64_t> volume_multiples(const Grid& grid) {
    const int jmax = grid.dim() * grid.max_depth();
    std::vector<std::int64_t> out;
    out.reserve(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        out.push_back(std::int64_t{1} << (jmax - grid.volume_exponent(n)));
    }
    return out;
}

double regularity_constant(const Domain& domain, const Cell& cell) {
    const double scale = std::ldexp(1.0, -cell.depth);
    double volume = 1.0;
    double diag2 = 0.0;
    for (const auto& l : domain.lengths) {
        double side = to_double(l) * scale;
        volume *= side;
        diag2 += side * side;
    }
    const double r = 0.5 * std::sqrt(diag2);
    const double d = domain.dim;
    const double ball = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(r, d);
    return volume / ball;
}

double regularity_constant(const Domain& domain) { return regularity_constant(domain, Cell{}); }

nlohmann::json domain_to_json(const Domain& domain) {
    nlohmann::json j;
    j["dim"] = domain.dim;
    j["origin"] = nlohmann::json::array();
    j["lengths"] = nlohmann::json::array();
    for (const auto& o : domain.origin) {
        j["origin"].push_back(rational_to_json(o));
    }
    for (const auto& l : domain.lengths) {
        j["lengths"].push_back(rational_to_json(l));
    }
    return j;
}

Domain domain_from_json(const nlohmann::json& j) {
    Domain d;
    d.dim = j.at("dim").get<int>();
    if (j.contains("origin")) {
        for (const auto& o : j.at("origin")) {
            d.origin.push_back(rational_from_json(o));
        }
    } else {
        d.origin.assign(static_cast<std::size_t>(std::max(d.dim, 0)), Rational(0));
    }
    for (const auto& l : j.at("lengths")) {
        d.lengths.push_back(rational_from_json(l));
    }
    d.validate();
    return d;
}

nlohmann::json grid_to_json(const Grid& grid) {
    nlohmann::json j = domain_to_json(grid.domain());
    j["generation"] = grid.generation();
    auto& cells = j["cells"] = nlohmann::json::array();
    for (const auto& c : grid.cells()) {
        nlohmann::json idx = nlohmann::json::array();
        for (int a = 0; a < grid.dim(); ++a) {
            idx.push_back(c.index[static_cast<std::size_t>(a)]);
        }
        cells.push_back({{"depth", c.depth}, {"index", idx}});
    }
    return j;
}

Grid grid_from_json(const nlohmann::json& j) {
    Domain domain = domain_from_json(j);
    std::vector<Cell> cells;
    for (const auto& jc : j.at("cells")) {
        Cell c;
        c.depth = jc.at("depth").get<int>();
        const auto& idx = jc.at("index");
        if (idx.size() != static_cast<std::size_t>(domain.dim)) {
            throw Error("cell index arity does not match domain dimension");
        }
        for (int a = 0; a < domain.dim; ++a) {
            c.index[static_cast<std::size_t>(a)] = idx.at(static_cast<std::size_t>(a)).get<std::uint64_t>();
        }
        cells.push_back(c);
    }
    std::size_t generation = j.value("generation", std::size_t{0});
    Grid grid(std::move(domain), std::move(cells), generation);
    // Dyadic cells tile the box iff their Z-order ranges at the finest depth
    // are disjoint and cover [0, 2^(d*D)).
    const int d = grid.dim();
    const int fine = grid.max_depth();
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
    for (const auto& c : grid.cells()) {
        const int shift = d * (fine - c.depth);
        std::uint64_t code = morton_code(c, d);
        ranges.emplace_back(code << shift, (code + 1) << shift);
    }
    std::sort(ranges.begin(), ranges.end());
    std::uint64_t next = 0;
    for (const auto& [lo, hi] : ranges) {
        if (lo != next) {
            throw Error("grid cells do not partition the domain");
        }
        next = hi;
    }
    if (next != (std::uint64_t{1} << (d * fine))) {
        throw Error("grid cells do not partition the domain");
    }
    return grid;
}

} // namespace ciagrid
