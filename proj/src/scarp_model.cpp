#include "ciagrid/scarp_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ciagrid/json_io.hpp"

namespace ciagrid {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

} // namespace

Rational ScarpInstance::switch_cost(int a, int b) const {
    if (switch_matrix) {
        return (*switch_matrix)[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
    if (a == b) {
        return 0;
    }
    return mode_weights[static_cast<std::size_t>(a)] + mode_weights[static_cast<std::size_t>(b)];
}

void ScarpInstance::validate() const {
    const auto M = static_cast<std::size_t>(modes);
    if (modes < 1 || k.size() != cells || weight.size() != cells || fixed.size() != cells ||
        lower.size() != cells * M || upper.size() != cells * M || mode_weights.size() != M) {
        throw Error("SCARP instance has inconsistent sizes");
    }
    if (cells > 0 && *std::min_element(k.begin(), k.end()) != 0) {
        throw Error("SCARP instance needs at least one k_i = 0");
    }
    for (std::size_t i = 0; i < cells; ++i) {
        if (k[i] < 0 || k[i] > 62 || weight[i] != (std::int64_t{1} << k[i])) {
            throw Error("SCARP weights must be 2^k_i with k_i >= 0");
        }
        if (fixed[i] < -1 || fixed[i] >= modes) {
            throw Error("SCARP fixing out of range");
        }
    }
    for (const auto& w : mode_weights) {
        if (w < 0) {
            throw Error("mode weights must be nonnegative");
        }
    }
    if (switch_matrix) {
        const auto& c = *switch_matrix;
        if (c.size() != M) {
            throw Error("switch-cost matrix must be M x M");
        }
        for (std::size_t a = 0; a < M; ++a) {
            if (c[a].size() != M || c[a][a] != 0) {
                throw Error("switch-cost matrix must be M x M with zero diagonal");
            }
            for (std::size_t b = 0; b < M; ++b) {
                if (c[a][b] != c[b][a] || c[a][b] < 0) {
                    throw Error("switch-cost matrix must be symmetric and nonnegative");
                }
            }
        }
    }
    for (const auto& p : adjacency.pairs) {
        if (p.i >= p.j || p.j >= cells || p.interface <= 0) {
            throw Error("SCARP adjacency pair out of range");
        }
    }
}

ScarpInstance build_instance(const ControlField& alpha, const Grid& grid, const Rational& delta,
                             std::vector<Rational> mode_weights, bool fix_binary) {
    if (delta <= 0) {
        throw Error("tolerance must be positive");
    }
    if (grid.domain() != alpha.domain()) {
        throw Error("grid and control field live on different domains");
    }
    verify_admissible(grid);
    if (grid.max_depth() > alpha.ref_depth()) {
        throw Error("grid is finer than the reference depth of alpha");
    }

    ScarpInstance inst;
    inst.cells = grid.size();
    inst.modes = alpha.modes();
    const auto M = static_cast<std::size_t>(inst.modes);
    inst.mode_weights = mode_weights.empty() ? std::vector<Rational>(M, Rational(1)) : std::move(mode_weights);
    if (inst.mode_weights.size() != M) {
        throw Error("need one mode weight per mode");
    }
    inst.delta = delta;

    for (std::size_t n = 0; n < grid.size(); ++n) {
        inst.j_max = std::max(inst.j_max, grid.volume_exponent(n));
    }
    if (inst.j_max > 62) {
        throw Error("grid too deep for 64-bit weights");
    }
    inst.k.resize(inst.cells);
    inst.weight.resize(inst.cells);
    inst.fixed.assign(inst.cells, -1);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        inst.k[n] = inst.j_max - grid.volume_exponent(n);
        inst.weight[n] = std::int64_t{1} << inst.k[n];
        if (fix_binary) {
            if (auto mode = alpha.binary_mode(grid.cell(n))) {
                inst.fixed[n] = *mode;
            }
        }
    }

    // 2^{-j_i} alpha_{i,m} = integral / lambda(T0) = units / (2^{dL} D).
    const Rational per_unit =
        pow2(inst.j_max - grid.dim() * alpha.ref_depth()) / Rational(mpz_class(std::to_string(alpha.denominator())));
    const Rational slack = pow2(inst.j_max) * delta / grid.domain().volume();

    inst.lower.resize(inst.cells * M);
    inst.upper.resize(inst.cells * M);
    std::vector<std::int64_t> cum(M, 0);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        for (std::size_t m = 0; m < M; ++m) {
            cum[m] = checked_add(cum[m], alpha.integral_units(grid.cell(n), static_cast<int>(m)));
            const Rational centre = per_unit * Rational(mpz_class(std::to_string(cum[m])));
            const std::int64_t l = ceil_to_i64(centre - slack);
            const std::int64_t u = floor_to_i64(centre + slack);
            if (l > u) {
                throw InfeasibleError("prefix window for mode " + std::to_string(m + 1) + " at cell " +
                                      std::to_string(n + 1) + " is empty: tolerance " + to_string(delta) +
                                      " is too small for this grid");
            }
            inst.lower[m * inst.cells + n] = l;
            inst.upper[m * inst.cells + n] = u;
        }
    }
    inst.adjacency = adjacency(grid);
    inst.grid_hash = fnv1a_hex(grid_to_json(grid).dump());
    inst.alpha_hash = fnv1a_hex(control_to_json(alpha).dump());
    inst.validate();
    return inst;
}

Rational objective_value(const ScarpInstance& inst, const BinaryControl& omega) {
    if (omega.modes.size() != inst.cells) {
        throw Error("binary control does not match the instance size");
    }
    Rational total = 0;
    for (const auto& p : inst.adjacency.pairs) {
        total += p.interface * inst.switch_cost(omega.modes[p.i], omega.modes[p.j]);
    }
    return total;
}

bool is_feasible(const ScarpInstance& inst, const BinaryControl& omega) {
    if (omega.modes.size() != inst.cells) {
        return false;
    }
    std::vector<std::int64_t> sums(static_cast<std::size_t>(inst.modes), 0);
    for (std::size_t n = 0; n < inst.cells; ++n) {
        const int mode = omega.modes[n];
        if (mode < 0 || mode >= inst.modes || (inst.fixed[n] >= 0 && inst.fixed[n] != mode)) {
            return false;
        }
        sums[static_cast<std::size_t>(mode)] += inst.weight[n];
        for (int m = 0; m < inst.modes; ++m) {
            const auto s = sums[static_cast<std::size_t>(m)];
            if (s < inst.lo(m, n) || s > inst.up(m, n)) {
                return false;
            }
        }
    }
    return true;
}

std::vector<double> relaxed_point(const ControlField& alpha, const Grid& grid) {
    const auto M = static_cast<std::size_t>(alpha.modes());
    std::vector<double> point(grid.size() * M);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double vol = static_cast<double>(alpha.volume_units(grid.cell(n)));
        for (std::size_t m = 0; m < M; ++m) {
            point[n * M + m] = static_cast<double>(alpha.integral_units(grid.cell(n), static_cast<int>(m))) / vol;
        }
    }
    return point;
}

IntegerCosts integer_costs(const ScarpInstance& inst) {
    const int M = inst.modes;
    IntegerCosts out;
    out.neighbours.resize(inst.cells);
    mpz_class scale = 1;
    std::vector<std::vector<Rational>> exact(inst.adjacency.pairs.size());
    for (std::size_t p = 0; p < inst.adjacency.pairs.size(); ++p) {
        const auto& pair = inst.adjacency.pairs[p];
        out.neighbours[pair.i].push_back({pair.j, p});
        out.neighbours[pair.j].push_back({pair.i, p});
        exact[p].resize(static_cast<std::size_t>(M * M));
        for (int a = 0; a < M; ++a) {
            for (int b = 0; b < M; ++b) {
                Rational c = pair.interface * inst.switch_cost(a, b);
                exact[p][static_cast<std::size_t>(a * M + b)] = c;
                mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), c.get_den_mpz_t());
            }
        }
    }
    if (!scale.fits_slong_p()) {
        throw Error("switching costs need a common denominator beyond 64 bits");
    }
    out.scale = scale.get_si();
    out.pair_cost.resize(exact.size());
    for (std::size_t p = 0; p < exact.size(); ++p) {
        for (const auto& c : exact[p]) {
            Rational scaled = c * Rational(scale);
            out.pair_cost[p].push_back(floor_to_i64(scaled));
        }
    }
    return out;
}

PrefixWindows::PrefixWindows(const ScarpInstance& inst) : cells_(inst.cells) {
    const std::size_t N = inst.cells;
    const auto M = static_cast<std::size_t>(inst.modes);
    min_.assign(N * M, 0);
    max_.assign(N * M, 0);
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    for (std::size_t m = 0; m < M; ++m) {
        const int mi = static_cast<int>(m);
        // can[n]: weight of cells <= n that may take mode m; must[n]: fixed to m.
        std::vector<std::int64_t> can(N + 1, 0);
        std::vector<std::int64_t> must(N + 1, 0);
        for (std::size_t i = 0; i < N; ++i) {
            const int f = inst.fixed[i];
            can[i + 1] = can[i] + ((f < 0 || f == mi) ? inst.weight[i] : 0);
            must[i + 1] = must[i] + (f == mi ? inst.weight[i] : 0);
        }
        // For n in [-1, N-1], with sums over prefixes n' >= n:
        //   P <= min(u(n') - must(n')) + must(n),  P >= max(l(n') - can(n')) + can(n).
        std::int64_t best_up = kInf;
        std::int64_t best_lo = -kInf;
        for (std::size_t n = N; n-- > 0;) {
            best_up = std::min(best_up, inst.up(mi, n) - must[n + 1]);
            best_lo = std::max(best_lo, inst.lo(mi, n) - can[n + 1]);
            max_[m * N + n] = best_up + must[n + 1];
            min_[m * N + n] = best_lo + can[n + 1];
        }
        if (N > 0 && (best_lo > 0 || best_up < 0)) {
            root_ok_ = false;
        }
    }
}

std::int64_t Cut::activity(const BinaryControl& omega) const {
    std::int64_t a = 0;
    for (const auto& t : terms) {
        if (omega.modes.at(t.cell) == t.mode) {
            a += t.coef;
        }
    }
    return a;
}

double Cut::activity(const std::vector<double>& point, int modes) const {
    double a = 0.0;
    for (const auto& t : terms) {
        a += static_cast<double>(t.coef) * point.at(t.cell * static_cast<std::size_t>(modes) + static_cast<std::size_t>(t.mode));
    }
    return a;
}

bool Cut::satisfied_by(const BinaryControl& omega) const {
    const std::int64_t a = activity(omega);
    return sense == Sense::greater_equal ? a >= rhs : a <= rhs;
}

double Cut::violation(const std::vector<double>& point, int modes) const {
    const double a = activity(point, modes);
    return sense == Sense::greater_equal ? static_cast<double>(rhs) - a : a - static_cast<double>(rhs);
}

std::string Cut::describe() const {
    std::ostringstream os;
    if (kind == CutKind::lattice) {
        os << "lattice m=" << origin.mode + 1 << " n=" << origin.n + 1 << " fixing={";
        for (std::size_t i = 0; i < origin.support.size(); ++i) {
            os << (i ? "," : "") << origin.support[i] + 1 << ":" << origin.fixing[i];
        }
        os << "}";
    } else {
        os << "parity m=" << origin.mode + 1 << " r=" << origin.r << " s=" << origin.s << " k=" << origin.k
           << (origin.upper ? " upper" : " lower");
    }
    return os.str();
}

std::vector<Cut> separate_lattice(const ScarpInstance& inst, const std::vector<double>& point, std::size_t n,
                                  int m, const SeparationOptions& options) {
    if (n >= inst.cells || m < 0 || m >= inst.modes) {
        throw Error("separate_lattice: prefix or mode out of range");
    }
    const std::int64_t l = inst.lo(m, n);
    const std::int64_t u = inst.up(m, n);
    if (l > u) {
        return {};
    }
    int k_max = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        k_max = std::max(k_max, inst.k[i]);
    }
    std::vector<std::size_t> ic;
    for (std::size_t i = 0; i <= n; ++i) {
        if (inst.k[i] < k_max) {
            ic.push_back(i);
        }
    }
    if (ic.empty()) {
        return {};
    }
    if (ic.size() > options.lattice_cap) {
        throw SizeLimit("lattice separation: |I_C| = " + std::to_string(ic.size()) + " exceeds cap " +
                        std::to_string(options.lattice_cap));
    }
    const auto M = static_cast<std::size_t>(inst.modes);
    auto value = [&](std::size_t i) { return point.at(i * M + static_cast<std::size_t>(m)); };
    // Most fractional first so that the distance bound bites early.
    std::stable_sort(ic.begin(), ic.end(), [&](std::size_t a, std::size_t b) {
        return std::min(value(a), 1 - value(a)) > std::min(value(b), 1 - value(b));
    });
    std::vector<double> rest(ic.size() + 1, 0.0);
    for (std::size_t p = ic.size(); p-- > 0;) {
        rest[p] = rest[p + 1] + std::max(0.0, std::min(value(ic[p]), 1 - value(ic[p])));
    }

    const std::int64_t step = std::int64_t{1} << k_max;
    double best = 1.0 - options.tolerance;
    std::vector<int> current(ic.size(), 0);
    std::vector<int> best_fixing;

    auto lattice_free = [&](std::int64_t shift) {
        const std::int64_t lo = l - shift;
        const std::int64_t hi = u - shift;
        return ceil_div(lo, step) * step > hi;
    };
    auto search = [&](auto&& self, std::size_t pos, std::int64_t shift, double dist) -> void {
        if (dist + rest[pos] >= best) {
            return;
        }
        if (pos == ic.size()) {
            if (lattice_free(shift)) {
                best = dist;
                best_fixing = current;
            }
            return;
        }
        const double v = value(ic[pos]);
        const int first = v >= 0.5 ? 1 : 0;
        for (int b : {first, 1 - first}) {
            current[pos] = b;
            self(self, pos + 1, shift + b * inst.weight[ic[pos]], dist + std::abs(v - b));
        }
        current[pos] = 0;
    };
    search(search, 0, 0, 0.0);
    if (best_fixing.empty()) {
        return {};
    }

    Cut cut;
    cut.kind = CutKind::lattice;
    cut.sense = Sense::greater_equal;
    std::vector<std::pair<std::size_t, int>> fix;
    for (std::size_t p = 0; p < ic.size(); ++p) {
        fix.emplace_back(ic[p], best_fixing[p]);
    }
    std::sort(fix.begin(), fix.end());
    std::int64_t ones = 0;
    for (const auto& [cell, b] : fix) {
        cut.terms.push_back({cell, m, b == 0 ? 1 : -1});
        ones += b;
        cut.origin.support.push_back(cell);
        cut.origin.fixing.push_back(b);
    }
    cut.rhs = 1 - ones;
    cut.origin.mode = m;
    cut.origin.n = n;
    return {cut};
}

ParityResult separate_parity(const ScarpInstance& inst, const std::vector<double>& point, int m,
                             const SeparationOptions& options, Exec exec) {
    const std::size_t N = inst.cells;
    const auto M = static_cast<std::size_t>(inst.modes);
    const int k_top = N ? *std::max_element(inst.k.begin(), inst.k.end()) : 0;
    const auto K = static_cast<std::size_t>(k_top) + 1;

    // Prefix sums of the rounded coefficients at every divisor exponent.
    std::vector<double> up_sum(K * (N + 1), 0.0);
    std::vector<double> low_sum(K * (N + 1), 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < N; ++i) {
            const double v = point.at(i * M + static_cast<std::size_t>(m));
            const int ki = inst.k[i];
            const double coef = ki >= static_cast<int>(k) ? std::ldexp(1.0, ki - static_cast<int>(k)) : 0.0;
            up_sum[k * (N + 1) + i + 1] = up_sum[k * (N + 1) + i] + coef * v;
            low_sum[k * (N + 1) + i + 1] = low_sum[k * (N + 1) + i] + (coef > 0 ? coef : 1.0) * v;
        }
    }
    auto lo_at = [&](std::size_t r) { return r == 0 ? std::int64_t{0} : inst.lo(m, r - 1); };
    auto up_at = [&](std::size_t r) { return r == 0 ? std::int64_t{0} : inst.up(m, r - 1); };

    auto make_cut = [&](std::size_t r, std::size_t s, int k, bool upper, std::int64_t rhs) {
        Cut cut;
        cut.kind = CutKind::parity;
        cut.sense = upper ? Sense::less_equal : Sense::greater_equal;
        cut.rhs = rhs;
        for (std::size_t i = r; i < s; ++i) {
            if (inst.k[i] >= k) {
                cut.terms.push_back({i, m, std::int64_t{1} << (inst.k[i] - k)});
            } else if (!upper) {
                cut.terms.push_back({i, m, 1});
            }
        }
        cut.origin.mode = m;
        cut.origin.r = r;
        cut.origin.s = s;
        cut.origin.k = k;
        cut.origin.upper = upper;
        return cut;
    };

    std::vector<std::vector<Cut>> per_r(N);
    std::vector<char> infeasible(N, 0);
    auto scan = [&](std::size_t r) {
        int kmin = 63;
        int kmax = -1;
        std::int64_t reach = 0;  // largest possible interval sum
        for (std::size_t s = r + 1; s <= N; ++s) {
            kmin = std::min(kmin, inst.k[s - 1]);
            kmax = std::max(kmax, inst.k[s - 1]);
            reach += inst.weight[s - 1];
            const std::int64_t lo = inst.lo(m, s - 1) - up_at(r);
            const std::int64_t hi = inst.up(m, s - 1) - lo_at(r);
            if (hi < lo || hi < 0 || lo > reach) {
                infeasible[r] = 1;
                continue;
            }
            for (int k = kmin; k <= kmax; ++k) {
                const auto ks = static_cast<std::size_t>(k);
                const std::int64_t div = std::int64_t{1} << k;
                const std::int64_t up_rhs = floor_div(hi, div);
                const double up_act = up_sum[ks * (N + 1) + s] - up_sum[ks * (N + 1) + r];
                if (up_act - static_cast<double>(up_rhs) > options.tolerance) {
                    per_r[r].push_back(make_cut(r, s, k, true, up_rhs));
                }
                const std::int64_t low_rhs = ceil_div(lo, div);
                const double low_act = low_sum[ks * (N + 1) + s] - low_sum[ks * (N + 1) + r];
                if (static_cast<double>(low_rhs) - low_act > options.tolerance) {
                    per_r[r].push_back(make_cut(r, s, k, false, low_rhs));
                }
            }
        }
    };

    const auto count = static_cast<std::ptrdiff_t>(N);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_cap())
        for (std::ptrdiff_t r = 0; r < count; ++r) {
            scan(static_cast<std::size_t>(r));
        }
    } else {
        for (std::ptrdiff_t r = 0; r < count; ++r) {
            scan(static_cast<std::size_t>(r));
        }
    }

    ParityResult result;
    for (std::size_t r = 0; r < N; ++r) {
        result.infeasible = result.infeasible || infeasible[r];
        for (auto& c : per_r[r]) {
            result.cuts.push_back(std::move(c));
        }
    }
    return result;
}

std::vector<Cut> separate_all(const ScarpInstance& inst, const std::vector<double>& point, CutSelection which,
                              const SeparationOptions& options) {
    std::vector<Cut> cuts;
    auto same_inequality = [](const Cut& a, const Cut& b) {
        return a.sense == b.sense && a.rhs == b.rhs && a.terms == b.terms;
    };
    auto add = [&](Cut c) {
        for (const auto& existing : cuts) {
            if (same_inequality(existing, c)) {
                return;
            }
        }
        cuts.push_back(std::move(c));
    };
    for (int m = 0; m < inst.modes; ++m) {
        if (which.lattice) {
            for (std::size_t n = 0; n < inst.cells; ++n) {
                try {
                    for (auto& c : separate_lattice(inst, point, n, m, options)) {
                        add(std::move(c));
                    }
                } catch (const SizeLimit&) {
                    // skipped: the fixing search is capped
                }
            }
        }
        if (which.parity) {
            for (auto& c : separate_parity(inst, point, m, options).cuts) {
                add(std::move(c));
            }
        }
    }
    return cuts;
}

namespace {

std::string var_w(std::size_t n, int m) { return "w_" + std::to_string(n + 1) + "_" + std::to_string(m + 1); }

std::string var_s(std::size_t i, std::size_t j, int m) {
    return "s_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + "_" + std::to_string(m + 1);
}

// Writes " + c x" terms, wrapping long rows.
class RowWriter {
public:
    explicit RowWriter(std::ostringstream& os) : os_(os) {}

    void term(const std::string& coef, const std::string& var) {
        if (count_ > 0 && count_ % 8 == 0) {
            os_ << "\n   ";
        }
        const bool negative = !coef.empty() && coef[0] == '-';
        if (count_ == 0) {
            os_ << (negative ? "- " : "");
        } else {
            os_ << (negative ? " - " : " + ");
        }
        std::string mag = negative ? coef.substr(1) : coef;
        if (mag != "1") {
            os_ << mag << ' ';
        }
        os_ << var;
        ++count_;
    }

    std::size_t count() const { return count_; }

private:
    std::ostringstream& os_;
    std::size_t count_ = 0;
};

} // namespace

std::string export_lp(const ScarpInstance& inst, const std::vector<Cut>& cuts) {
    if (inst.switch_matrix) {
        throw Error("LP export supports per-mode switching weights only, not a general cost matrix");
    }
    std::ostringstream os;
    os << "\\ switching-cost-aware rounding model\n";
    os << "\\ cells " << inst.cells << " modes " << inst.modes << " j_max " << inst.j_max << " delta "
       << to_string(inst.delta) << "\n";
    os << "\\ grid " << inst.grid_hash << " alpha " << inst.alpha_hash << "\n";

    os << "Minimize\n obj: ";
    {
        RowWriter row(os);
        for (const auto& p : inst.adjacency.pairs) {
            for (int m = 0; m < inst.modes; ++m) {
                Rational c = p.interface * inst.mode_weights[static_cast<std::size_t>(m)];
                if (c != 0) {
                    row.term(to_decimal_string(c), var_s(p.i, p.j, m));
                }
            }
        }
        if (row.count() == 0) {
            os << "0 " << var_w(0, 0);
        }
    }
    os << "\nSubject To\n";
    for (std::size_t n = 0; n < inst.cells; ++n) {
        os << " onehot_" << n + 1 << ": ";
        RowWriter row(os);
        for (int m = 0; m < inst.modes; ++m) {
            row.term("1", var_w(n, m));
        }
        os << " = 1\n";
    }
    for (int m = 0; m < inst.modes; ++m) {
        for (std::size_t n = 0; n < inst.cells; ++n) {
            const std::string tag = std::to_string(n + 1) + "_" + std::to_string(m + 1);
            auto body = [&] {
                RowWriter row(os);
                for (std::size_t i = 0; i <= n; ++i) {
                    row.term(std::to_string(inst.weight[i]), var_w(i, m));
                }
            };
            if (inst.lo(m, n) == inst.up(m, n)) {
                os << " win_" << tag << ": ";
                body();
                os << " = " << inst.lo(m, n) << "\n";
            } else {
                os << " lo_" << tag << ": ";
                body();
                os << " >= " << inst.lo(m, n) << "\n";
                os << " up_" << tag << ": ";
                body();
                os << " <= " << inst.up(m, n) << "\n";
            }
        }
    }
    for (const auto& p : inst.adjacency.pairs) {
        for (int m = 0; m < inst.modes; ++m) {
            const std::string tag = std::to_string(p.i + 1) + "_" + std::to_string(p.j + 1) + "_" + std::to_string(m + 1);
            os << " sa_" << tag << ": " << var_s(p.i, p.j, m) << " - " << var_w(p.i, m) << " + " << var_w(p.j, m)
               << " >= 0\n";
            os << " sb_" << tag << ": " << var_s(p.i, p.j, m) << " + " << var_w(p.i, m) << " - " << var_w(p.j, m)
               << " >= 0\n";
        }
    }
    for (std::size_t c = 0; c < cuts.size(); ++c) {
        os << " cut_" << c + 1 << ": ";
        RowWriter row(os);
        for (const auto& t : cuts[c].terms) {
            row.term(std::to_string(t.coef), var_w(t.cell, t.mode));
        }
        os << (cuts[c].sense == Sense::greater_equal ? " >= " : " <= ") << cuts[c].rhs << "\n";
    }
    for (std::size_t n = 0; n < inst.cells; ++n) {
        if (inst.fixed[n] >= 0) {
            os << " fix_" << n + 1 << ": " << var_w(n, inst.fixed[n]) << " = 1\n";
        }
    }
    os << "Binaries\n";
    for (std::size_t n = 0; n < inst.cells; ++n) {
        os << " ";
        for (int m = 0; m < inst.modes; ++m) {
            os << (m ? " " : "") << var_w(n, m);
        }
        os << "\n";
    }
    os << "End\n";
    return os.str();
}

nlohmann::json instance_to_json(const ScarpInstance& inst) {
    nlohmann::json j;
    j["cells"] = inst.cells;
    j["modes"] = inst.modes;
    j["j_max"] = inst.j_max;
    j["k"] = inst.k;
    j["fixed"] = nlohmann::json::array();
    for (int f : inst.fixed) {
        j["fixed"].push_back(f < 0 ? nlohmann::json(nullptr) : nlohmann::json(f + 1));
    }
    j["lower"] = nlohmann::json::array();
    j["upper"] = nlohmann::json::array();
    for (int m = 0; m < inst.modes; ++m) {
        nlohmann::json lo = nlohmann::json::array();
        nlohmann::json up = nlohmann::json::array();
        for (std::size_t n = 0; n < inst.cells; ++n) {
            lo.push_back(inst.lo(m, n));
            up.push_back(inst.up(m, n));
        }
        j["lower"].push_back(lo);
        j["upper"].push_back(up);
    }
    j["adjacency"] = nlohmann::json::array();
    for (const auto& p : inst.adjacency.pairs) {
        j["adjacency"].push_back({p.i + 1, p.j + 1, rational_to_json(p.interface)});
    }
    j["mode_weights"] = nlohmann::json::array();
    for (const auto& w : inst.mode_weights) {
        j["mode_weights"].push_back(rational_to_json(w));
    }
    j["delta"] = rational_to_json(inst.delta);
    j["grid_hash"] = inst.grid_hash;
    j["alpha_hash"] = inst.alpha_hash;
    return j;
}

} // namespace ciagrid
