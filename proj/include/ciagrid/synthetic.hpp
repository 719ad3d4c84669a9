#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ciagrid/control.hpp"
#include "ciagrid/grid.hpp"

namespace ciagrid {

enum class Family { constant_blend, linear_front, radial_bump, checkerboard, helmholtz_slice };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct FieldSpec {
    Family family = Family::linear_front;
    int dim = 2;
    int modes = 2;
    int ref_depth = 5;
    /// Values are multiples of 1 / quantum.
    int quantum = 16;
    std::uint64_t seed = 1;
};

/// Seeded synthetic relaxed control on the unit box. Fronts and bumps blend
/// between two random modes over a band and are one-hot elsewhere; the
/// checkerboard is one-hot on 2^c blocks per axis with blended block edges.
/// helmholtz_slice needs load_helmholtz_slice instead.
ControlField generate_field(const FieldSpec& spec);

/// The frozen 16 x 16 two-mode slice shipped in data/.
ControlField load_helmholtz_slice(const std::string& data_dir);

/// Independent random cell values: each reference cell is one-hot with
/// probability `binary_share`, else a random composition of `quantum`.
ControlField random_field(int dim, int modes, int ref_depth, int quantum, double binary_share, std::mt19937_64& rng);

/// Root box split at random cells (depth <= max_depth) until `cells` is
/// reached or no cell can be split.
Grid random_grid(const Domain& domain, int max_depth, std::size_t cells, std::mt19937_64& rng);

struct NamedField {
    std::string name;
    ControlField alpha;
};

/// Smooth two-mode fields (fronts and bumps, 1D and 2D) used for the
/// adaptive-versus-uniform comparison.
std::vector<NamedField> smooth_suite(std::uint64_t seed, std::size_t count, int ref_depth_2d = 6, int ref_depth_1d = 8);

} // namespace ciagrid
