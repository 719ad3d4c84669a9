#include "ciagrid/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ciagrid/json_io.hpp"

namespace ciagrid {

std::string to_string(Family f) {
    switch (f) {
    case Family::constant_blend: return "constant_blend";
    case Family::linear_front: return "linear_front";
    case Family::radial_bump: return "radial_bump";
    case Family::checkerboard: return "checkerboard";
    case Family::helmholtz_slice: return "helmholtz_slice";
    }
    return "unknown";
}

Family family_from_string(const std::string& s) {
    for (auto f : {Family::constant_blend, Family::linear_front, Family::radial_bump, Family::checkerboard,
                   Family::helmholtz_slice}) {
        if (to_string(f) == s) {
            return f;
        }
    }
    throw Error("unknown field family '" + s + "'");
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

std::vector<double> centre(std::size_t r, int depth, int dim) {
    const Cell c = cell_from_morton(r, depth, dim);
    std::vector<double> x(static_cast<std::size_t>(dim));
    const double h = std::ldexp(1.0, -depth);
    for (int a = 0; a < dim; ++a) {
        x[static_cast<std::size_t>(a)] = (static_cast<double>(c.index[static_cast<std::size_t>(a)]) + 0.5) * h;
    }
    return x;
}

// Row with share t of mode a and 1 - t of mode b, t rounded to the quantum.
std::vector<Rational> blend(int modes, int a, int b, double t, int quantum) {
    const long q = std::lround(std::clamp(t, 0.0, 1.0) * quantum);
    std::vector<Rational> row(static_cast<std::size_t>(modes), Rational(0));
    row[static_cast<std::size_t>(a)] = ratio(q, quantum);
    row[static_cast<std::size_t>(b)] += ratio(quantum - q, quantum);
    return row;
}

std::pair<int, int> two_modes(int modes, std::mt19937_64& rng) {
    const int a = uniform_int(rng, 0, modes - 1);
    int b = uniform_int(rng, 0, modes - 2);
    if (b >= a) {
        ++b;
    }
    return {a, b};
}

} // namespace

ControlField generate_field(const FieldSpec& spec) {
    if (spec.modes < 2) {
        throw Error("synthetic fields need at least two modes");
    }
    if (spec.quantum < 1) {
        throw Error("quantum must be positive");
    }
    std::mt19937_64 rng(spec.seed);
    const Domain domain = Domain::unit_box(spec.dim);
    const std::size_t R = std::size_t{1} << (spec.dim * spec.ref_depth);
    std::vector<std::vector<Rational>> values(R);
    const int M = spec.modes;

    switch (spec.family) {
    case Family::constant_blend: {
        // random composition of the quantum over the modes
        std::vector<int> parts(static_cast<std::size_t>(M), 0);
        for (int s = 0; s < spec.quantum; ++s) {
            ++parts[static_cast<std::size_t>(uniform_int(rng, 0, M - 1))];
        }
        std::vector<Rational> row(static_cast<std::size_t>(M));
        for (int m = 0; m < M; ++m) {
            row[static_cast<std::size_t>(m)] = ratio(parts[static_cast<std::size_t>(m)], spec.quantum);
        }
        std::fill(values.begin(), values.end(), row);
        break;
    }
    case Family::linear_front: {
        const auto [a, b] = two_modes(M, rng);
        std::vector<double> n(static_cast<std::size_t>(spec.dim));
        double norm = 0.0;
        for (auto& v : n) {
            v = uniform(rng, -1.0, 1.0);
            norm += v * v;
        }
        norm = std::sqrt(std::max(norm, 1e-12));
        for (auto& v : n) {
            v /= norm;
        }
        const double offset = uniform(rng, 0.3, 0.7);
        const double width = uniform(rng, 0.1, 0.25);
        for (std::size_t r = 0; r < R; ++r) {
            const auto x = centre(r, spec.ref_depth, spec.dim);
            double s = 0.0;
            for (int k = 0; k < spec.dim; ++k) {
                s += n[static_cast<std::size_t>(k)] * (x[static_cast<std::size_t>(k)] - 0.5);
            }
            values[r] = blend(M, a, b, 0.5 + (s + 0.5 - offset) / width, spec.quantum);
        }
        break;
    }
    case Family::radial_bump: {
        const auto [a, b] = two_modes(M, rng);
        std::vector<double> c(static_cast<std::size_t>(spec.dim));
        for (auto& v : c) {
            v = uniform(rng, 0.3, 0.7);
        }
        const double r0 = uniform(rng, 0.1, 0.25);
        const double width = uniform(rng, 0.08, 0.2);
        for (std::size_t r = 0; r < R; ++r) {
            const auto x = centre(r, spec.ref_depth, spec.dim);
            double d2 = 0.0;
            for (int k = 0; k < spec.dim; ++k) {
                const double t = x[static_cast<std::size_t>(k)] - c[static_cast<std::size_t>(k)];
                d2 += t * t;
            }
            values[r] = blend(M, a, b, 1.0 - (std::sqrt(d2) - r0) / width, spec.quantum);
        }
        break;
    }
    case Family::checkerboard: {
        const auto [a, b] = two_modes(M, rng);
        const int blocks = std::min(spec.ref_depth, uniform_int(rng, 1, 2));
        const int shift = spec.ref_depth - blocks;
        for (std::size_t r = 0; r < R; ++r) {
            const Cell cell = cell_from_morton(r, spec.ref_depth, spec.dim);
            std::uint64_t parity = 0;
            bool edge = false;
            for (int k = 0; k < spec.dim; ++k) {
                const auto idx = cell.index[static_cast<std::size_t>(k)];
                parity += idx >> shift;
                const auto within = idx & ((std::uint64_t{1} << shift) - 1);
                edge = edge || (shift > 0 && (within == 0 || within + 1 == (std::uint64_t{1} << shift)));
            }
            const bool first = parity % 2 == 0;
            values[r] = blend(M, a, b, edge ? (first ? 0.75 : 0.25) : (first ? 1.0 : 0.0), spec.quantum);
        }
        break;
    }
    case Family::helmholtz_slice:
        throw Error("helmholtz_slice is frozen data; use load_helmholtz_slice");
    }
    return ControlField(domain, M, spec.ref_depth, values);
}

ControlField load_helmholtz_slice(const std::string& data_dir) {
    return control_from_json(read_json_file(data_dir + "/helmholtz16.json"));
}

ControlField random_field(int dim, int modes, int ref_depth, int quantum, double binary_share, std::mt19937_64& rng) {
    const std::size_t R = std::size_t{1} << (dim * ref_depth);
    std::vector<std::vector<Rational>> values(R);
    for (auto& row : values) {
        row.assign(static_cast<std::size_t>(modes), Rational(0));
        if (uniform(rng, 0.0, 1.0) < binary_share) {
            row[static_cast<std::size_t>(uniform_int(rng, 0, modes - 1))] = 1;
            continue;
        }
        for (int s = 0; s < quantum; ++s) {
            row[static_cast<std::size_t>(uniform_int(rng, 0, modes - 1))] += ratio(1, quantum);
        }
    }
    return ControlField(Domain::unit_box(dim), modes, ref_depth, values);
}

Grid random_grid(const Domain& domain, int max_depth, std::size_t cells, std::mt19937_64& rng) {
    Grid g = initial_grid(domain, 0);
    const std::size_t step = (std::size_t{1} << domain.dim) - 1;
    while (g.size() + step <= cells) {
        std::vector<std::size_t> splittable;
        for (std::size_t n = 0; n < g.size(); ++n) {
            if (g.cell(n).depth < max_depth) {
                splittable.push_back(n);
            }
        }
        if (splittable.empty()) {
            break;
        }
        const auto pick = std::uniform_int_distribution<std::size_t>(0, splittable.size() - 1)(rng);
        g = split_cell(g, splittable[pick]);
    }
    return g;
}

std::vector<NamedField> smooth_suite(std::uint64_t seed, std::size_t count, int ref_depth_2d, int ref_depth_1d) {
    std::vector<NamedField> out;
    for (std::size_t i = 0; i < count; ++i) {
        FieldSpec spec;
        spec.family = i % 2 == 0 ? Family::linear_front : Family::radial_bump;
        spec.dim = i % 4 < 2 ? 2 : 1;
        spec.ref_depth = spec.dim == 2 ? ref_depth_2d : ref_depth_1d;
        spec.modes = 2 + static_cast<int>((i / 4) % 2);
        spec.seed = seed + i;
        out.push_back({to_string(spec.family) + "_" + std::to_string(spec.dim) + "d_s" + std::to_string(spec.seed),
                       generate_field(spec)});
    }
    return out;
}

} // namespace ciagrid
