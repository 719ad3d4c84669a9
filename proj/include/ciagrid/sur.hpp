#pragma once

#include <functional>
#include <vector>

#include "ciagrid/control.hpp"
#include "ciagrid/grid.hpp"

namespace ciagrid {

/// Per-step state of sum-up rounding, in units of the control field.
struct SurStep {
    std::vector<std::int64_t> gamma;
    std::vector<std::int64_t> phi;
    int mode = 0;
    bool copied = false;  // alpha already binary on the cell
};

/// Sum-up rounding that copies alpha on cells where it is exactly binary and
/// otherwise picks the largest accumulated deficit (smallest mode on ties).
BinaryControl sur_variant(const ControlField& alpha, const Grid& grid);

/// Same as sur_variant, also returning gamma/phi for every cell.
BinaryControl sur_variant_traced(const ControlField& alpha, const Grid& grid, std::vector<SurStep>& trace);

/// A rounding algorithm maps (alpha, grid) to a binary control on the grid.
using RoundingAlgorithm = std::function<BinaryControl(const ControlField&, const Grid&)>;

} // namespace ciagrid
