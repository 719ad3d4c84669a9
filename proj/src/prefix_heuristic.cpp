#include "ciagrid/prefix_heuristic.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <unordered_map>

namespace ciagrid {

namespace {

struct Label {
    std::vector<int> frontier;       // modes of the current frontier cells
    std::vector<std::int64_t> sums;  // weighted prefix sum per mode
    std::int64_t cost = 0;
    std::size_t history = 0;         // trie node of the last decision
};

struct HistoryNode {
    std::size_t parent;
    int mode;
};

struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (auto v : key) {
            h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

} // namespace

SolveReport prefix_heuristic(const ScarpInstance& inst, const HeuristicConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t N = inst.cells;
    const int M = inst.modes;
    const IntegerCosts costs = integer_costs(inst);
    const PrefixWindows windows(inst);

    SolveReport report;
    if (N == 0) {
        report.has_incumbent = true;
        report.proven_optimal = true;
        report.incumbent_source = IncumbentSource::heuristic;
        return report;
    }
    if (!windows.root_feasible()) {
        throw InfeasibleError("no assignment satisfies the prefix windows");
    }

    // A cell stays on the frontier until its last neighbour is decided.
    std::vector<std::size_t> last(N);
    for (std::size_t c = 0; c < N; ++c) {
        last[c] = c;
        for (const auto& [other, p] : costs.neighbours[c]) {
            last[c] = std::max(last[c], other);
        }
    }

    std::vector<HistoryNode> trie{{0, -1}};
    std::vector<Label> labels(1);
    labels[0].sums.assign(static_cast<std::size_t>(M), 0);
    std::vector<std::size_t> frontier;  // cell ids, ascending
    bool merged_exactly = true;

    for (std::size_t c = 0; c < N; ++c) {
        // Position of every lower-index neighbour of c inside the frontier.
        std::vector<std::pair<std::size_t, std::size_t>> links;  // (frontier slot, pair)
        for (const auto& [other, p] : costs.neighbours[c]) {
            if (other < c) {
                const auto it = std::lower_bound(frontier.begin(), frontier.end(), other);
                links.emplace_back(static_cast<std::size_t>(it - frontier.begin()), p);
            }
        }
        std::vector<std::size_t> next_frontier;
        std::vector<std::size_t> keep;  // old slots that survive
        for (std::size_t s = 0; s < frontier.size(); ++s) {
            if (last[frontier[s]] > c) {
                next_frontier.push_back(frontier[s]);
                keep.push_back(s);
            }
        }
        const bool enters = last[c] > c;
        if (enters) {
            next_frontier.push_back(c);
        }
        report.max_window = std::max(report.max_window, next_frontier.size());
        const std::size_t W = std::min(config.window, next_frontier.size());
        if (W < next_frontier.size()) {
            merged_exactly = false;
        }

        // Extensions per parent, generated in mode order.
        std::vector<std::vector<Label>> children(labels.size());
        auto extend = [&](std::size_t li) {
            const Label& parent = labels[li];
            auto& out = children[li];
            for (int a = 0; a < M; ++a) {
                if (inst.fixed[c] >= 0 && inst.fixed[c] != a) {
                    continue;
                }
                Label child;
                child.sums = parent.sums;
                child.sums[static_cast<std::size_t>(a)] += inst.weight[c];
                bool good = true;
                for (int m = 0; m < M && good; ++m) {
                    good = windows.admits(m, c, child.sums[static_cast<std::size_t>(m)]);
                }
                if (!good) {
                    continue;
                }
                child.cost = parent.cost;
                for (const auto& [slot, p] : links) {
                    const auto& pair = inst.adjacency.pairs[p];
                    const int b = parent.frontier[slot];
                    child.cost += pair.i == c ? costs.cost(p, a, b, M) : costs.cost(p, b, a, M);
                }
                child.frontier.reserve(next_frontier.size());
                for (auto s : keep) {
                    child.frontier.push_back(parent.frontier[s]);
                }
                if (enters) {
                    child.frontier.push_back(a);
                }
                child.history = static_cast<std::size_t>(a);  // mode; trie node assigned in the merge
                out.push_back(std::move(child));
            }
        };
        const auto L = static_cast<std::ptrdiff_t>(labels.size());
        if (config.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_cap())
            for (std::ptrdiff_t li = 0; li < L; ++li) {
                extend(static_cast<std::size_t>(li));
            }
        } else {
            for (std::ptrdiff_t li = 0; li < L; ++li) {
                extend(static_cast<std::size_t>(li));
            }
        }

        // Serial merge in generation order keeps the first cheapest label.
        std::vector<Label> next;
        std::vector<std::size_t> parent_of;
        std::unordered_map<std::vector<std::int64_t>, std::size_t, KeyHash> index;
        std::vector<std::int64_t> key;
        for (std::size_t li = 0; li < children.size(); ++li) {
            for (auto& child : children[li]) {
                key.assign(child.frontier.end() - static_cast<std::ptrdiff_t>(W), child.frontier.end());
                key.insert(key.end(), child.sums.begin(), child.sums.end());
                const auto [it, inserted] = index.try_emplace(key, next.size());
                if (inserted) {
                    next.push_back(std::move(child));
                    parent_of.push_back(li);
                } else if (child.cost < next[it->second].cost) {
                    next[it->second] = std::move(child);
                    parent_of[it->second] = li;
                }
            }
        }
        if (config.beam > 0 && next.size() > config.beam) {
            merged_exactly = false;
            std::vector<std::size_t> order(next.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t x, std::size_t y) { return next[x].cost < next[y].cost; });
            order.resize(config.beam);
            std::sort(order.begin(), order.end());
            std::vector<Label> kept;
            std::vector<std::size_t> kept_parent;
            for (auto o : order) {
                kept.push_back(std::move(next[o]));
                kept_parent.push_back(parent_of[o]);
            }
            next = std::move(kept);
            parent_of = std::move(kept_parent);
        }
        if (next.empty()) {
            throw InfeasibleError("prefix sweep found no assignment satisfying the windows at cell " +
                                  std::to_string(c + 1));
        }
        for (std::size_t q = 0; q < next.size(); ++q) {
            const int mode = static_cast<int>(next[q].history);
            trie.push_back({labels[parent_of[q]].history, mode});
            next[q].history = trie.size() - 1;
        }
        labels = std::move(next);
        frontier = std::move(next_frontier);
    }

    std::size_t best = 0;
    for (std::size_t q = 1; q < labels.size(); ++q) {
        if (labels[q].cost < labels[best].cost) {
            best = q;
        }
    }
    report.best.modes.assign(N, -1);
    std::size_t node = labels[best].history;
    for (std::size_t c = N; c-- > 0;) {
        report.best.modes[c] = trie[node].mode;
        node = trie[node].parent;
    }
    report.has_incumbent = true;
    report.incumbent_source = IncumbentSource::heuristic;
    report.objective = objective_value(inst, report.best);
    report.proven_optimal = merged_exactly;
    report.dual_bound = merged_exactly ? report.objective : Rational(0);
    report.nodes = trie.size() - 1;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace ciagrid
