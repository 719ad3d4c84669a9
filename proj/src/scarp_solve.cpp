#include "ciagrid/scarp_solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "ciagrid/json_io.hpp"
#include "ciagrid/prefix_heuristic.hpp"

namespace ciagrid {

std::string to_string(IncumbentSource s) {
    switch (s) {
    case IncumbentSource::none: return "none";
    case IncumbentSource::supplied: return "supplied";
    case IncumbentSource::heuristic: return "heuristic";
    case IncumbentSource::search: return "search";
    case IncumbentSource::enumeration: return "enumeration";
    }
    return "unknown";
}

double SolveReport::gap() const {
    if (!has_incumbent) {
        return std::numeric_limits<double>::infinity();
    }
    if (dual_bound == 0) {
        return objective == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return to_double((objective - dual_bound) / dual_bound);
}

nlohmann::json report_to_json(const SolveReport& r) {
    nlohmann::json j;
    j["has_incumbent"] = r.has_incumbent;
    j["primal"] = r.has_incumbent ? nlohmann::json(to_double(r.objective)) : nlohmann::json(nullptr);
    j["primal_exact"] = r.has_incumbent ? nlohmann::json(to_string(r.objective)) : nlohmann::json(nullptr);
    j["dual"] = to_double(r.dual_bound);
    j["dual_exact"] = to_string(r.dual_bound);
    const double g = r.gap();
    j["gap"] = std::isfinite(g) ? nlohmann::json(g) : nlohmann::json(nullptr);
    j["proven_optimal"] = r.proven_optimal;
    j["nodes"] = r.nodes;
    j["incumbent_source"] = to_string(r.incumbent_source);
    j["max_window"] = r.max_window;
    if (r.has_incumbent) {
        j["omega"] = binary_control_to_json(r.best)["modes"];
    }
    return j;
}

namespace {

std::int64_t integer_objective(const ScarpInstance& inst, const IntegerCosts& costs, const BinaryControl& omega) {
    std::int64_t total = 0;
    for (std::size_t p = 0; p < inst.adjacency.pairs.size(); ++p) {
        const auto& pair = inst.adjacency.pairs[p];
        total += costs.cost(p, omega.modes[pair.i], omega.modes[pair.j], inst.modes);
    }
    return total;
}

Rational to_cost(std::int64_t value, std::int64_t scale) {
    return ratio(value, scale);
}

struct Enumeration {
    std::vector<std::size_t> free_cells;
    std::uint64_t count = 1;
};

Enumeration plan_enumeration(const ScarpInstance& inst, std::size_t cap) {
    if (inst.cells * static_cast<std::size_t>(inst.modes) > cap) {
        throw SizeLimit("enumeration of " + std::to_string(inst.cells) + " cells x " + std::to_string(inst.modes) +
                        " modes exceeds the cap of " + std::to_string(cap) + " variables");
    }
    Enumeration e;
    for (std::size_t n = 0; n < inst.cells; ++n) {
        if (inst.fixed[n] < 0) {
            e.free_cells.push_back(n);
            e.count *= static_cast<std::uint64_t>(inst.modes);
        }
    }
    return e;
}

// The index-th assignment; the first free cell is the most significant digit
// so that index order is lexicographic order.
void decode(const ScarpInstance& inst, const Enumeration& e, std::uint64_t index, BinaryControl& omega) {
    omega.modes.resize(inst.cells);
    for (std::size_t n = 0; n < inst.cells; ++n) {
        omega.modes[n] = inst.fixed[n];
    }
    for (std::size_t f = e.free_cells.size(); f-- > 0;) {
        omega.modes[e.free_cells[f]] = static_cast<int>(index % static_cast<std::uint64_t>(inst.modes));
        index /= static_cast<std::uint64_t>(inst.modes);
    }
}

} // namespace

std::vector<BinaryControl> enumerate_feasible(const ScarpInstance& inst, std::size_t cap) {
    const Enumeration e = plan_enumeration(inst, cap);
    std::vector<BinaryControl> out;
    BinaryControl omega;
    for (std::uint64_t idx = 0; idx < e.count; ++idx) {
        decode(inst, e, idx, omega);
        if (is_feasible(inst, omega)) {
            out.push_back(omega);
        }
    }
    return out;
}

SolveReport brute_force(const ScarpInstance& inst, std::size_t cap, Exec exec) {
    const auto start = std::chrono::steady_clock::now();
    const Enumeration e = plan_enumeration(inst, cap);
    const IntegerCosts costs = integer_costs(inst);
    constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

    struct Best {
        std::int64_t cost = std::numeric_limits<std::int64_t>::max();
        std::uint64_t index = kNone;
    };
    auto better = [](const Best& a, const Best& b) {
        return a.cost != b.cost ? a.cost < b.cost : a.index < b.index;
    };
    auto scan = [&](std::uint64_t lo, std::uint64_t hi) {
        Best best;
        BinaryControl omega;
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
            decode(inst, e, idx, omega);
            if (!is_feasible(inst, omega)) {
                continue;
            }
            Best cand{integer_objective(inst, costs, omega), idx};
            if (better(cand, best)) {
                best = cand;
            }
        }
        return best;
    };

    Best best;
    if (exec == Exec::parallel) {
        const auto chunks = static_cast<std::ptrdiff_t>(std::min<std::uint64_t>(e.count, 256));
        std::vector<Best> partial(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic) num_threads(thread_cap())
        for (std::ptrdiff_t c = 0; c < chunks; ++c) {
            const auto uc = static_cast<std::uint64_t>(c);
            const auto nc = static_cast<std::uint64_t>(chunks);
            partial[static_cast<std::size_t>(c)] = scan(e.count * uc / nc, e.count * (uc + 1) / nc);
        }
        for (const auto& p : partial) {
            if (better(p, best)) {
                best = p;
            }
        }
    } else {
        best = scan(0, e.count);
    }

    if (best.index == kNone) {
        throw InfeasibleError("no assignment satisfies the prefix windows");
    }
    SolveReport r;
    decode(inst, e, best.index, r.best);
    r.has_incumbent = true;
    r.objective = to_cost(best.cost, costs.scale);
    r.dual_bound = r.objective;
    r.proven_optimal = true;
    r.nodes = e.count;
    r.incumbent_source = IncumbentSource::enumeration;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

CutCheck check_cut(const ScarpInstance& inst, const Cut& cut, std::size_t cap) {
    const Enumeration e = plan_enumeration(inst, cap);
    BinaryControl omega;
    for (std::uint64_t idx = 0; idx < e.count; ++idx) {
        decode(inst, e, idx, omega);
        if (is_feasible(inst, omega) && !cut.satisfied_by(omega)) {
            return {false, omega};
        }
    }
    return {true, std::nullopt};
}

namespace {

// Activity bookkeeping for cuts used as hard constraints.
class CutPropagator {
public:
    CutPropagator(const ScarpInstance& inst, const std::vector<Cut>& cuts) : modes_(inst.modes), cuts_(cuts) {
        const auto M = static_cast<std::size_t>(modes_);
        by_cell_.resize(inst.cells);
        act_.assign(cuts.size(), 0);
        rem_max_.assign(cuts.size(), 0);
        rem_min_.assign(cuts.size(), 0);
        for (std::size_t q = 0; q < cuts.size(); ++q) {
            std::vector<std::pair<std::size_t, std::vector<std::int64_t>>> cells;
            for (const auto& t : cuts[q].terms) {
                if (t.cell >= inst.cells || t.mode < 0 || t.mode >= modes_) {
                    throw Error("cut refers to a variable outside the instance");
                }
                if (cells.empty() || cells.back().first != t.cell) {
                    cells.emplace_back(t.cell, std::vector<std::int64_t>(M, 0));
                }
                cells.back().second[static_cast<std::size_t>(t.mode)] += t.coef;
            }
            for (auto& [cell, contrib] : cells) {
                Entry entry{q, contrib, 0, 0};
                bool first = true;
                for (int m = 0; m < modes_; ++m) {
                    if (inst.fixed[cell] >= 0 && inst.fixed[cell] != m) {
                        continue;
                    }
                    const auto c = contrib[static_cast<std::size_t>(m)];
                    entry.max = first ? c : std::max(entry.max, c);
                    entry.min = first ? c : std::min(entry.min, c);
                    first = false;
                }
                rem_max_[q] += entry.max;
                rem_min_[q] += entry.min;
                by_cell_[cell].push_back(std::move(entry));
            }
        }
    }

    bool feasible_at_root() const {
        for (std::size_t q = 0; q < cuts_.size(); ++q) {
            if (!ok(q)) {
                return false;
            }
        }
        return true;
    }

    /// Applies cell := mode and reports whether every touched cut can still hold.
    bool assign(std::size_t cell, int mode) {
        bool good = true;
        for (const auto& e : by_cell_[cell]) {
            act_[e.cut] += e.contrib[static_cast<std::size_t>(mode)];
            rem_max_[e.cut] -= e.max;
            rem_min_[e.cut] -= e.min;
            good = good && ok(e.cut);
        }
        return good;
    }

    void unassign(std::size_t cell, int mode) {
        for (const auto& e : by_cell_[cell]) {
            act_[e.cut] -= e.contrib[static_cast<std::size_t>(mode)];
            rem_max_[e.cut] += e.max;
            rem_min_[e.cut] += e.min;
        }
    }

private:
    struct Entry {
        std::size_t cut;
        std::vector<std::int64_t> contrib;
        std::int64_t max;
        std::int64_t min;
    };

    bool ok(std::size_t q) const {
        if (cuts_[q].sense == Sense::greater_equal) {
            return act_[q] + rem_max_[q] >= cuts_[q].rhs;
        }
        return act_[q] + rem_min_[q] <= cuts_[q].rhs;
    }

    int modes_;
    const std::vector<Cut>& cuts_;
    std::vector<std::vector<Entry>> by_cell_;
    std::vector<std::int64_t> act_;
    std::vector<std::int64_t> rem_max_;
    std::vector<std::int64_t> rem_min_;
};

} // namespace

SolveReport solve_exact(const ScarpInstance& inst, const std::optional<BinaryControl>& incumbent,
                        const SolveConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t N = inst.cells;
    const int M = inst.modes;
    const IntegerCosts costs = integer_costs(inst);
    const PrefixWindows windows(inst);
    CutPropagator cuts(inst, config.cuts);

    SolveReport report;
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
    std::int64_t best_cost = kInf;

    auto adopt = [&](const BinaryControl& omega, IncumbentSource source) {
        if (!is_feasible(inst, omega)) {
            return;
        }
        for (const auto& c : config.cuts) {
            if (!c.satisfied_by(omega)) {
                return;
            }
        }
        const std::int64_t c = integer_objective(inst, costs, omega);
        if (c < best_cost) {
            best_cost = c;
            report.best = omega;
            report.has_incumbent = true;
            report.incumbent_source = source;
        }
    };
    if (incumbent) {
        adopt(*incumbent, IncumbentSource::supplied);
    } else if (config.use_heuristic) {
        try {
            HeuristicConfig hc;
            hc.window = config.heuristic_window;
            hc.beam = config.heuristic_beam;
            adopt(prefix_heuristic(inst, hc).best, IncumbentSource::heuristic);
        } catch (const InfeasibleError&) {
            // no warm start
        }
    }

    auto finish = [&](bool exhausted, std::int64_t dual) {
        report.proven_optimal = exhausted;
        if (report.has_incumbent) {
            report.objective = to_cost(best_cost, costs.scale);
        }
        report.dual_bound = to_cost(exhausted ? best_cost : dual, costs.scale);
        report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return report;
    };

    if (N == 0) {
        report.best.modes.clear();
        report.has_incumbent = true;
        best_cost = 0;
        return finish(true, 0);
    }
    if (!windows.root_feasible() || !cuts.feasible_at_root()) {
        if (report.has_incumbent) {
            throw Error("inconsistent instance: incumbent feasible but root infeasible");
        }
        throw InfeasibleError("no assignment satisfies the prefix windows");
    }

    struct Candidate {
        std::int64_t bound;
        int mode;
    };
    struct Frame {
        std::size_t cell;
        std::int64_t base;
        std::vector<Candidate> cand;
        std::size_t next = 0;
        int active = -1;
    };

    std::vector<int> modes(N, -1);
    std::vector<std::int64_t> sums(static_cast<std::size_t>(M), 0);
    std::vector<Frame> stack;

    auto make_frame = [&](std::size_t cell, std::int64_t base) {
        Frame f{cell, base, {}, 0, -1};
        for (int a = 0; a < M; ++a) {
            if (inst.fixed[cell] >= 0 && inst.fixed[cell] != a) {
                continue;
            }
            std::int64_t inc = 0;
            for (const auto& [other, p] : costs.neighbours[cell]) {
                if (other < cell) {
                    const auto& pair = inst.adjacency.pairs[p];
                    inc += pair.i == cell ? costs.cost(p, a, modes[other], M) : costs.cost(p, modes[other], a, M);
                }
            }
            f.cand.push_back({base + inc, a});
        }
        std::stable_sort(f.cand.begin(), f.cand.end(),
                         [](const Candidate& x, const Candidate& y) { return x.bound < y.bound; });
        return f;
    };
    auto open_bound = [&]() {
        std::int64_t b = best_cost;
        for (const auto& f : stack) {
            if (f.next < f.cand.size()) {
                b = std::min(b, f.cand[f.next].bound);
            }
        }
        return b;
    };
    auto apply = [&](std::size_t cell, int a) {
        modes[cell] = a;
        sums[static_cast<std::size_t>(a)] += inst.weight[cell];
        bool good = cuts.assign(cell, a);
        for (int m = 0; m < M && good; ++m) {
            good = windows.admits(m, cell, sums[static_cast<std::size_t>(m)]);
        }
        return good;
    };
    auto undo = [&](std::size_t cell, int a) {
        cuts.unassign(cell, a);
        sums[static_cast<std::size_t>(a)] -= inst.weight[cell];
        modes[cell] = -1;
    };

    stack.push_back(make_frame(0, 0));
    std::uint64_t nodes = 0;
    std::uint64_t logged = 0;
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.active >= 0) {
            undo(f.cell, f.active);
            f.active = -1;
        }
        if (f.next >= f.cand.size()) {
            stack.pop_back();
            continue;
        }
        if (config.dual_log_every > 0 && nodes >= logged + config.dual_log_every) {
            logged = nodes - nodes % config.dual_log_every;
            report.dual_log.push_back(to_cost(open_bound(), costs.scale));
        }
        if (nodes >= config.node_budget ||
            ((nodes & 1023) == 0 && nodes > 0 &&
             std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
                 config.time_budget_seconds)) {
            report.nodes = nodes;
            return finish(false, open_bound());
        }
        const Candidate c = f.cand[f.next++];
        if (c.bound >= best_cost) {
            f.next = f.cand.size();  // sorted: every remaining sibling is dominated
            continue;
        }
        const std::size_t cell = f.cell;
        f.active = c.mode;
        if (!apply(cell, c.mode)) {
            continue;
        }
        ++nodes;
        if (cell + 1 == N) {
            best_cost = c.bound;
            report.best.modes = modes;
            report.has_incumbent = true;
            report.incumbent_source = IncumbentSource::search;
            continue;
        }
        stack.push_back(make_frame(cell + 1, c.bound));
    }

    report.nodes = nodes;
    if (!report.has_incumbent) {
        throw InfeasibleError("no assignment satisfies the prefix windows and cuts");
    }
    return finish(true, best_cost);
}

} // namespace ciagrid
