#pragma once

#include <cstddef>
#include <vector>

#include "ciagrid/control.hpp"
#include "ciagrid/grid.hpp"
#include "ciagrid/sur.hpp"

namespace ciagrid {

/// The most non-binary cell is already at reference depth and cannot be split.
class DepthExhausted : public Error {
public:
    using Error::Error;
};

/// d exceeds the tolerance although alpha is binary on every cell; only
/// possible with a rounding algorithm that does not reproduce binary alpha.
class RefinementStalled : public Error {
public:
    using Error::Error;
};

struct RefinementRecord {
    std::size_t iteration = 0;
    std::size_t split_cell = 0;  // 0-based position of the cell that was split
    Rational delta_cell;         // non-binariness of that cell
    Rational distance;           // d^T before the split
    std::size_t cells = 0;       // N before the split
};

struct RefinementResult {
    Grid grid;
    BinaryControl omega;  // certificate: d^T(alpha, omega) <= tolerance on grid
    Rational distance;
    std::size_t iterations = 0;
    std::vector<RefinementRecord> history;
};

/// Alternates rounding and splitting of the cell with the largest
/// non-binariness (smallest position on ties) until d^T <= tolerance.
RefinementResult refine_until(const ControlField& alpha, const Rational& tolerance, const Grid& grid0,
                              const RoundingAlgorithm& ra = sur_variant);

/// Coarsest uniform depth j <= L whose grid meets the tolerance under `ra`;
/// returns -1 if none does.
int coarsest_uniform_depth(const ControlField& alpha, const Rational& tolerance,
                           const RoundingAlgorithm& ra = sur_variant);

} // namespace ciagrid
