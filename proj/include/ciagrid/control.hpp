#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

#include "ciagrid/grid.hpp"
#include "ciagrid/parallel.hpp"
#include "ciagrid/rational.hpp"

namespace ciagrid {

/// Relaxed control alpha, piecewise constant on the uniform depth-L dyadic
/// reference grid, stored in Z-order.
///
/// Values are kept as integer numerators over one common denominator. All
/// integrals are then exact integers in "units" of
///     lambda(Omega) / (2^(d L) * denominator),
/// the integral of alpha_m over one reference cell being its numerator.
class ControlField {
public:
    /// values[r][m] for reference cell r (Z-order). Every row must lie in the
    /// probability simplex exactly. Inactive (masked) cells must be one-hot.
    ControlField(Domain domain, int modes, int ref_depth, const std::vector<std::vector<Rational>>& values,
                 std::vector<bool> active = {});

    const Domain& domain() const { return domain_; }
    int modes() const { return modes_; }
    int ref_depth() const { return ref_depth_; }
    std::size_t ref_cells() const { return ref_cells_; }
    std::int64_t denominator() const { return denominator_; }
    const std::vector<bool>& active() const { return active_; }

    Rational value(std::size_t ref_cell, int m) const;

    /// Measure of one unit.
    Rational unit() const;
    Rational to_measure(std::int64_t units) const { return unit() * Rational(mpz_class(std::to_string(units))); }

    /// Volume of `cell` in units; throws Error if cell is deeper than L.
    std::int64_t volume_units(const Cell& cell) const;
    /// Integral of alpha_m over `cell` in units.
    std::int64_t integral_units(const Cell& cell, int m) const;

    /// Mode j with alpha_j = 1 on every reference cell inside `cell`.
    std::optional<int> binary_mode(const Cell& cell) const;

    /// Uniform grid of the reference cells, for convenience.
    Grid reference_grid() const { return initial_grid(domain_, ref_depth_); }

private:
    std::pair<std::uint64_t, std::uint64_t> ref_range(const Cell& cell) const;

    Domain domain_;
    int modes_ = 0;
    int ref_depth_ = 0;
    std::size_t ref_cells_ = 0;
    std::int64_t denominator_ = 1;
    std::vector<std::int64_t> numer_;   // ref_cells x modes
    std::vector<std::int64_t> prefix_;  // (ref_cells + 1) x modes
    std::vector<bool> active_;
};

/// One-hot mode assignment per grid cell; modes are 0-based.
struct BinaryControl {
    std::vector<int> modes;

    friend bool operator==(const BinaryControl&, const BinaryControl&) = default;
};

std::vector<Rational> cell_integral(const ControlField& alpha, const Cell& cell);

/// max_m min(int_T alpha_m, lambda(T) - int_T alpha_m).
Rational nonbinariness(const ControlField& alpha, const Cell& cell);
std::int64_t nonbinariness_units(const ControlField& alpha, const Cell& cell);

/// Non-binariness of every grid cell, in units.
std::vector<std::int64_t> nonbinariness_all(const ControlField& alpha, const Grid& grid,
                                            Exec exec = Exec::parallel);

/// d^T(alpha, omega): max over prefixes n of the max-norm of
/// sum_{i <= n} (int_{T_i} alpha - lambda(T_i) e_{omega_i}).
Rational pseudometric(const ControlField& alpha, const BinaryControl& omega, const Grid& grid);
std::int64_t pseudometric_units(const ControlField& alpha, const BinaryControl& omega, const Grid& grid);

/// Instance file: {domain, M, L, alpha: [[...], ...], order?: "z"|"row-major", mask?: [...]}.
/// Row-major flattens with axis 0 fastest.
ControlField control_from_json(const nlohmann::json& j);
nlohmann::json control_to_json(const ControlField& alpha);

nlohmann::json binary_control_to_json(const BinaryControl& omega);
BinaryControl binary_control_from_json(const nlohmann::json& j);

} // namespace ciagrid
