#include <random>

#include "doctest.h"

#include "ciagrid/refinement.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ciagrid;
using support::q;

TEST_CASE("one-hot field needs no refinement") {
    const ControlField a = support::field(1, 2, {{"1", "0"}, {"0", "1"}, {"0", "1"}, {"1", "0"}});
    const Grid g0 = initial_grid(a.domain(), 0);
    const RefinementResult r = refine_until(a, q("0.01"), g0);
    // the root is not binary, so this does refine; on the reference grid it is exact
    CHECK(r.distance == 0);

    const Grid g2 = initial_grid(a.domain(), 2);
    const RefinementResult s = refine_until(a, q("0.01"), g2);
    CHECK(s.iterations == 0);
    CHECK(s.grid == g2);
}

TEST_CASE("refinement trace for a half-half field with tolerance 0.2") {
    const ControlField a = support::constant_field(1, 3, {"0.5", "0.5"});
    const RefinementResult r = refine_until(a, q("0.2"), initial_grid(a.domain(), 0));
    REQUIRE(r.history.size() == 3);
    CHECK(r.history[0].distance == q("0.5"));
    CHECK(r.history[0].split_cell == 0);
    CHECK(r.history[1].distance == q("0.25"));
    CHECK(r.history[1].split_cell == 0);
    CHECK(r.history[2].distance == q("0.25"));
    CHECK(r.history[2].split_cell == 2);
    CHECK(r.grid.size() == 4);
    for (std::size_t n = 0; n < 4; ++n) {
        CHECK(r.grid.volume(n) == q("1/4"));
    }
    CHECK(r.distance == q("0.125"));
    CHECK(oracle::pseudometric(a, r.omega, r.grid) == q("0.125"));
}

TEST_CASE("2D half-half field terminates with non-increasing history") {
    const ControlField a = support::constant_field(2, 4, {"0.5", "0.5"});
    const RefinementResult r = refine_until(a, q("0.3"), initial_grid(a.domain(), 0));
    CHECK(r.distance <= q("0.3"));
    for (std::size_t i = 1; i < r.history.size(); ++i) {
        CHECK(r.history[i].delta_cell <= r.history[i - 1].delta_cell);
    }
}

TEST_CASE("refinement contract on random fields") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const int dim = 1 + trial % 2;
        const int M = 2 + trial % 2;
        const int L = dim == 1 ? 5 : 3;
        const ControlField a = random_field(dim, M, L, 4, 0.3, rng);
        const Rational floor_tol = a.domain().volume() * pow2(-dim * L) * (M - 1);
        const Rational tol = floor_tol * std::uniform_int_distribution<int>(4, 40)(rng);
        const RefinementResult r = refine_until(a, tol, initial_grid(a.domain(), 0));
        CHECK(oracle::pseudometric(a, r.omega, r.grid) <= tol);
        CHECK(r.distance == oracle::pseudometric(a, r.omega, r.grid));
        verify_admissible(r.grid);

        // replay: every split is an in-place dissection, max delta and the
        // largest volume among non-binary cells never increase
        Grid g = initial_grid(a.domain(), 0);
        Rational last_max_vol(-1);
        for (std::size_t i = 0; i < r.history.size(); ++i) {
            const auto& h = r.history[i];
            Rational best(0), max_vol(0);
            for (std::size_t n = 0; n < g.size(); ++n) {
                const Rational nb = oracle::nonbinariness(a, g.cell(n));
                if (nb > best) {
                    best = nb;
                }
                if (nb > 0 && g.volume(n) > max_vol) {
                    max_vol = g.volume(n);
                }
            }
            CHECK(h.delta_cell == best);
            CHECK(h.cells == g.size());
            if (i > 0) {
                CHECK(h.delta_cell <= r.history[i - 1].delta_cell);
                CHECK(max_vol <= last_max_vol);
            }
            last_max_vol = max_vol;
            g = split_cell(g, h.split_cell);
        }
        CHECK(g == r.grid);
    }
}

TEST_CASE("depth exhaustion is reported") {
    const ControlField a = support::constant_field(1, 1, {"0.5", "0.5"});
    CHECK_THROWS_AS(refine_until(a, q("0.1"), initial_grid(a.domain(), 0)), DepthExhausted);
}

TEST_CASE("a rounding algorithm that ignores binary cells stalls") {
    const ControlField a = support::field(1, 1, {{"1", "0"}, {"0", "1"}});
    auto always_first = [](const ControlField&, const Grid& g) {
        return BinaryControl{std::vector<int>(g.size(), 0)};
    };
    CHECK_THROWS_AS(refine_until(a, q("0.1"), initial_grid(a.domain(), 1), always_first), RefinementStalled);
}

TEST_CASE("adaptive grids beat uniform ones on a one-hot half plane") {
    // linear blend in the left half, one-hot right half
    std::vector<std::vector<std::string>> rows;
    const int L = 4;
    for (std::uint64_t z = 0; z < 256; ++z) {
        const auto ax = oracle::ref_axes(z, L, 2);
        if (ax[0] >= 8) {
            rows.push_back({"1", "0"});
        } else {
            rows.push_back({std::to_string(ax[0] * 2 + 1) + "/16", std::to_string(15 - ax[0] * 2) + "/16"});
        }
    }
    const ControlField a = support::field(2, L, rows);
    const Rational tol = q("1/64");
    const RefinementResult r = refine_until(a, tol, initial_grid(a.domain(), 0));
    const int depth = coarsest_uniform_depth(a, tol);
    REQUIRE(depth >= 0);
    CHECK(r.grid.size() < (std::size_t{1} << (2 * depth)));
}
