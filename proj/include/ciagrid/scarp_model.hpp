#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ciagrid/control.hpp"
#include "ciagrid/grid.hpp"
#include "ciagrid/parallel.hpp"
#include "ciagrid/rational.hpp"

namespace ciagrid {

/// Some prefix window [l, u] contains no integer: the tolerance is too small
/// for this grid, or no assignment satisfies the constraints.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// An enumeration or search exceeds its configured size cap.
class SizeLimit : public Error {
public:
    using Error::Error;
};

/// Switching-cost-aware rounding integer program on a dyadic grid.
///
/// Variables w[n][m] in {0,1} with sum_m w[n][m] = 1 and, for every mode m
/// and prefix n,
///     lower(m, n) <= sum_{i <= n} 2^k[i] w[i][m] <= upper(m, n).
/// Cells are 0-based here; exported names are 1-based.
struct ScarpInstance {
    std::size_t cells = 0;
    int modes = 0;
    int j_max = 0;
    std::vector<int> k;                  // k[i] = j_max - j_i
    std::vector<std::int64_t> weight;    // 2^k[i]
    std::vector<std::int64_t> lower;     // modes x cells, row-major by mode
    std::vector<std::int64_t> upper;
    Adjacency adjacency;
    std::vector<Rational> mode_weights;  // per-mode switching weights, default 1
    /// Optional symmetric switch-cost matrix with zero diagonal. When set it
    /// replaces w_a + w_b as the cost of an a|b interface; not exportable to LP.
    std::optional<std::vector<std::vector<Rational>>> switch_matrix;
    std::vector<int> fixed;              // forced mode per cell, -1 if free
    Rational delta;
    std::string grid_hash;
    std::string alpha_hash;

    std::int64_t lo(int m, std::size_t n) const { return lower[static_cast<std::size_t>(m) * cells + n]; }
    std::int64_t up(int m, std::size_t n) const { return upper[static_cast<std::size_t>(m) * cells + n]; }

    /// Cost per unit interface of a cell in mode a next to a cell in mode b.
    Rational switch_cost(int a, int b) const;

    /// Structural checks (sizes, k >= 0 with a zero, weights 2^k, fixings).
    void validate() const;
};

/// Builds the integer program for alpha on grid with tolerance delta.
/// Throws InfeasibleError when some lower(m, n) > upper(m, n).
ScarpInstance build_instance(const ControlField& alpha, const Grid& grid, const Rational& delta,
                             std::vector<Rational> mode_weights = {}, bool fix_binary = true);

/// Sum over adjacent pairs of interface * switch_cost(mode_i, mode_j).
Rational objective_value(const ScarpInstance& inst, const BinaryControl& omega);

/// Whether omega satisfies every prefix window and every fixing.
bool is_feasible(const ScarpInstance& inst, const BinaryControl& omega);

/// Cell averages of alpha as a fractional point, [n * M + m].
std::vector<double> relaxed_point(const ControlField& alpha, const Grid& grid);

/// Integer pair costs: pair_cost[p][a * M + b] / scale equals
/// interface_p * switch_cost(a, b). Shared by the combinatorial solvers.
struct IntegerCosts {
    std::int64_t scale = 1;
    std::vector<std::vector<std::int64_t>> pair_cost;
    /// neighbours[n] = (other cell, pair index).
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> neighbours;

    std::int64_t cost(std::size_t pair, int a, int b, int modes) const {
        return pair_cost[pair][static_cast<std::size_t>(a * modes + b)];
    }
};
IntegerCosts integer_costs(const ScarpInstance& inst);

/// Exact per-mode relaxation of all remaining prefix windows. After cells
/// 0..n are decided with weighted sum P for mode m, every later window can
/// still be met (ignoring the coupling between modes and lattice effects)
/// iff min_sum(m, n) <= P <= max_sum(m, n). Fixed cells are accounted for.
class PrefixWindows {
public:
    explicit PrefixWindows(const ScarpInstance& inst);

    std::int64_t min_sum(int m, std::size_t n) const { return min_[static_cast<std::size_t>(m) * cells_ + n]; }
    std::int64_t max_sum(int m, std::size_t n) const { return max_[static_cast<std::size_t>(m) * cells_ + n]; }
    bool admits(int m, std::size_t n, std::int64_t sum) const { return sum >= min_sum(m, n) && sum <= max_sum(m, n); }
    /// The empty prefix can be completed.
    bool root_feasible() const { return root_ok_; }

private:
    std::size_t cells_ = 0;
    std::vector<std::int64_t> min_;
    std::vector<std::int64_t> max_;
    bool root_ok_ = true;
};

enum class CutKind { lattice, parity };
enum class Sense { greater_equal, less_equal };

struct CutTerm {
    std::size_t cell = 0;
    int mode = 0;
    std::int64_t coef = 0;

    friend bool operator==(const CutTerm&, const CutTerm&) = default;
};

/// Data that generated a cut: the prefix n, mode m and fixing of the
/// non-maximal weights for lattice cuts; the prefix pair (r, s) and divisor
/// exponent k for parity cuts.
struct CutOrigin {
    int mode = 0;
    std::size_t n = 0;
    std::vector<std::size_t> support;
    std::vector<int> fixing;
    std::size_t r = 0;
    std::size_t s = 0;
    int k = 0;
    bool upper = false;

    friend bool operator==(const CutOrigin&, const CutOrigin&) = default;
};

struct Cut {
    CutKind kind = CutKind::lattice;
    std::vector<CutTerm> terms;  // sorted by (cell, mode)
    Sense sense = Sense::greater_equal;
    std::int64_t rhs = 0;
    CutOrigin origin;

    std::int64_t activity(const BinaryControl& omega) const;
    double activity(const std::vector<double>& point, int modes) const;
    bool satisfied_by(const BinaryControl& omega) const;
    /// Amount by which the point violates the cut (<= 0 when satisfied).
    double violation(const std::vector<double>& point, int modes) const;
    std::string describe() const;

    friend bool operator==(const Cut&, const Cut&) = default;
};

struct SeparationOptions {
    double tolerance = 1e-9;
    std::size_t lattice_cap = 30;  // max |I_C| for the exact fixing search
};

/// Lattice no-good cut for prefix n (0-based, inclusive) and mode m: finds
/// the 0/1 fixing of the non-maximal-weight variables closest to `point` in
/// L1 whose residual window holds no multiple of 2^k_max, and emits
/// ||w_IC - fixing||_1 >= 1 if that distance is below 1.
/// Throws SizeLimit if |I_C| exceeds options.lattice_cap.
std::vector<Cut> separate_lattice(const ScarpInstance& inst, const std::vector<double>& point, std::size_t n,
                                  int m, const SeparationOptions& options = {});

struct ParityResult {
    std::vector<Cut> cuts;
    /// Some difference window is empty or out of reach of the interval
    /// weights: a proof that the instance is infeasible.
    bool infeasible = false;
};

/// Parity cuts for mode m over all prefix pairs 0 <= r < s <= N and divisor
/// exponents k in [k_min, k_max] of cells r..s-1 that the point violates.
ParityResult separate_parity(const ScarpInstance& inst, const std::vector<double>& point, int m,
                             const SeparationOptions& options = {}, Exec exec = Exec::parallel);

struct CutSelection {
    bool lattice = true;
    bool parity = true;
};

/// Runs both separators over every (n, m) and m; results in deterministic order.
std::vector<Cut> separate_all(const ScarpInstance& inst, const std::vector<double>& point,
                              CutSelection which = {}, const SeparationOptions& options = {});

/// LP-format model: binaries w_n_m, switch variables s_i_j_m, one-hot rows,
/// prefix window rows, fixing rows, and optional extra cut rows.
std::string export_lp(const ScarpInstance& inst, const std::vector<Cut>& cuts = {});

nlohmann::json instance_to_json(const ScarpInstance& inst);

} // namespace ciagrid
