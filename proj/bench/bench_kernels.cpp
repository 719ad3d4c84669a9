// Serial reference vs OpenMP kernel timings. Each row reports the median of
// the repetitions and whether both paths returned the same result.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ciagrid/control.hpp"
#include "ciagrid/grid.hpp"
#include "ciagrid/prefix_heuristic.hpp"
#include "ciagrid/refinement.hpp"
#include "ciagrid/scarp_model.hpp"
#include "ciagrid/scarp_solve.hpp"
#include "ciagrid/sur.hpp"
#include "ciagrid/synthetic.hpp"

using namespace ciagrid;

namespace {

template <class F>
double median_ms(int reps, F&& f) {
    std::vector<double> t;
    for (int r = 0; r < reps; ++r) {
        const auto s = std::chrono::steady_clock::now();
        f();
        t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - s).count());
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}

void row(const std::string& name, double serial, double parallel, bool same) {
    std::printf("%-28s %10.3f %10.3f %8.2fx %s\n", name.c_str(), serial, parallel,
                parallel > 0 ? serial / parallel : 0.0, same ? "same" : "DIFFERENT");
}

} // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
    std::printf("threads %d, %d repetitions\n", thread_cap(), reps);
    std::printf("%-28s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

    std::mt19937_64 rng(42);
    const ControlField a2 = random_field(2, 3, 6, 16, 0.5, rng);
    const Grid g2 = random_grid(a2.domain(), 6, 1500, rng);
    {
        Adjacency s, p;
        const double ts = median_ms(reps, [&] { s = adjacency(g2, Exec::serial); });
        const double tp = median_ms(reps, [&] { p = adjacency(g2, Exec::parallel); });
        row("adjacency (N=" + std::to_string(g2.size()) + ")", ts, tp, s.pairs.size() == p.pairs.size());
    }
    {
        std::vector<std::int64_t> s, p;
        const double ts = median_ms(reps, [&] { s = nonbinariness_all(a2, g2, Exec::serial); });
        const double tp = median_ms(reps, [&] { p = nonbinariness_all(a2, g2, Exec::parallel); });
        row("nonbinariness_all", ts, tp, s == p);
    }

    // Instance for the search kernels: 1D, two modes, 20 cells, nothing fixed.
    const ControlField a1 = random_field(1, 2, 6, 8, 0.2, rng);
    const Grid g1 = random_grid(a1.domain(), 6, 20, rng);
    const Rational step = a1.domain().volume() * pow2(-g1.max_depth());
    const ScarpInstance small = build_instance(a1, g1, pseudometric(a1, sur_variant(a1, g1), g1) + step, {}, false);
    {
        SolveReport s, p;
        const double ts = median_ms(reps, [&] { s = brute_force(small, 40, Exec::serial); });
        const double tp = median_ms(reps, [&] { p = brute_force(small, 40, Exec::parallel); });
        row("brute_force (N=" + std::to_string(small.cells) + ", M=2)", ts, tp, s.best == p.best);
    }

    const ControlField a3 = random_field(1, 3, 8, 16, 0.2, rng);
    const Grid g3 = random_grid(a3.domain(), 8, 200, rng);
    const Rational step3 = a3.domain().volume() * pow2(-g3.max_depth());
    const ScarpInstance big = build_instance(a3, g3, pseudometric(a3, sur_variant(a3, g3), g3) + 4 * step3);
    const std::vector<double> point = relaxed_point(a3, g3);
    {
        ParityResult s, p;
        const double ts = median_ms(reps, [&] { s = separate_parity(big, point, 0, {}, Exec::serial); });
        const double tp = median_ms(reps, [&] { p = separate_parity(big, point, 0, {}, Exec::parallel); });
        row("separate_parity (N=" + std::to_string(big.cells) + ")", ts, tp, s.cuts == p.cuts);
    }

    const ControlField a4 = generate_field({Family::radial_bump, 2, 2, 6, 16, 3});
    const Grid g4 = refine_until(a4, a4.domain().volume() * ratio(1, 256), initial_grid(a4.domain(), 0)).grid;
    const ScarpInstance h = build_instance(a4, g4, a4.domain().volume() * ratio(1, 256));
    {
        SolveReport s, p;
        HeuristicConfig hs, hp;
        hs.beam = hp.beam = 2000;
        hs.exec = Exec::serial;
        const double ts = median_ms(reps, [&] { s = prefix_heuristic(h, hs); });
        const double tp = median_ms(reps, [&] { p = prefix_heuristic(h, hp); });
        row("prefix_heuristic (N=" + std::to_string(h.cells) + ")", ts, tp, s.best == p.best);
    }
    return 0;
}
