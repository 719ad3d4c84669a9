#include <algorithm>
#include <random>

#include "doctest.h"

#include "ciagrid/scarp_model.hpp"
#include "ciagrid/scarp_solve.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ciagrid;
using support::manual;
using support::point2;
using support::q;

namespace {

bool contains(const std::vector<Cut>& cuts, const std::vector<CutTerm>& terms, Sense sense, std::int64_t rhs) {
    return std::any_of(cuts.begin(), cuts.end(), [&](const Cut& c) {
        return c.terms == terms && c.sense == sense && c.rhs == rhs;
    });
}

} // namespace

TEST_CASE("forced variable from the bound formulas") {
    const ControlField a = support::constant_field(1, 1, {"0.6", "0.4"});
    const Grid g = initial_grid(a.domain(), 1);
    const ScarpInstance inst = build_instance(a, g, q("0.25"));
    CHECK(inst.j_max == 1);
    CHECK(inst.k == std::vector<int>{0, 0});
    CHECK(inst.lo(0, 0) == 1);
    CHECK(inst.up(0, 0) == 1);
    CHECK_FALSE(is_feasible(inst, BinaryControl{{1, 0}}));
    CHECK(pseudometric(a, BinaryControl{{1, 0}}, g) == q("0.3"));

    const std::string lp = export_lp(inst);
    CHECK(lp.find("win_1_1: w_1_1 = 1") != std::string::npos);
}

TEST_CASE("one-hot fields fix every cell") {
    const ControlField a = support::field(1, 2, {{"1", "0"}, {"0", "1"}, {"0", "1"}, {"1", "0"}});
    const Grid g = initial_grid(a.domain(), 2);
    const ScarpInstance inst = build_instance(a, g, q("0.1"));
    CHECK(inst.fixed == std::vector<int>{0, 1, 1, 0});
    CHECK(build_instance(a, g, q("0.1"), {}, false).fixed == std::vector<int>(4, -1));
    const std::string lp = export_lp(inst);
    CHECK(lp.find("fix_1: w_1_1 = 1") != std::string::npos);
    CHECK(lp.find("fix_2: w_2_2 = 1") != std::string::npos);
}

TEST_CASE("uniform grids have unit weights") {
    std::mt19937_64 rng(2);
    const ControlField a = random_field(2, 3, 3, 4, 0.2, rng);
    const ScarpInstance inst = build_instance(a, initial_grid(a.domain(), 2), q("0.2"));
    CHECK(std::all_of(inst.k.begin(), inst.k.end(), [](int k) { return k == 0; }));
    CHECK(std::all_of(inst.weight.begin(), inst.weight.end(), [](std::int64_t w) { return w == 1; }));
}

TEST_CASE("objective examples") {
    const ControlField a1 = support::constant_field(1, 2, {"0.5", "0.5"});
    const ScarpInstance chain = build_instance(a1, support::grid_1d({2, 2, 1}), q("1"));
    CHECK(objective_value(chain, BinaryControl{{0, 0, 0}}) == 0);
    CHECK(objective_value(chain, BinaryControl{{0, 1, 1}}) == 2);

    const ControlField a2 = support::constant_field(2, 1, {"0.5", "0.5"});
    const ScarpInstance sq = build_instance(a2, initial_grid(a2.domain(), 1), q("1"));
    // Z-order positions 0,1,2,3 = (0,0),(1,0),(0,1),(1,1): checkerboard 1,2,2,1
    CHECK(objective_value(sq, BinaryControl{{0, 1, 1, 0}}) == 4);
}

TEST_CASE("bounds match the formulas and the distance") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto c = support::small_case(seed);
        if (!c) {
            continue;
        }
        const auto ob = oracle::bounds(c->alpha, c->grid, c->delta);
        for (int m = 0; m < c->inst.modes; ++m) {
            for (std::size_t n = 0; n < c->inst.cells; ++n) {
                CHECK(Rational(c->inst.lo(m, n)) == ob.lo[static_cast<std::size_t>(m)][n]);
                CHECK(Rational(c->inst.up(m, n)) == ob.up[static_cast<std::size_t>(m)][n]);
            }
        }
        // sequential knapsack: weights sorted ascending divide their successors
        auto w = c->inst.weight;
        std::sort(w.begin(), w.end());
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            CHECK(w[i + 1] % w[i] == 0);
        }
        CHECK(*std::min_element(c->inst.k.begin(), c->inst.k.end()) == 0);

        // pseudometric <= delta  <=>  windows hold (fixings aside)
        ScarpInstance free = c->inst;
        std::fill(free.fixed.begin(), free.fixed.end(), -1);
        const Rational grain = c->grid.domain().volume() * pow2(-free.j_max);
        oracle::each_assignment(free.cells, free.modes, [&](const BinaryControl& omega) {
            const Rational d = oracle::pseudometric(c->alpha, omega, c->grid);
            CHECK((d <= c->delta) == is_feasible(free, omega));
            if (is_feasible(free, omega)) {
                CHECK(d < c->delta + grain);
            }
        });
    }
}

TEST_CASE("objective is symmetric in the pair orientation") {
    for (std::uint64_t seed = 1; seed < 30; seed += 2) {
        const auto c = support::small_case(seed);
        if (!c) {
            continue;
        }
        ScarpInstance flipped = c->inst;
        for (auto& p : flipped.adjacency.pairs) {
            std::swap(p.i, p.j);
        }
        std::mt19937_64 rng(seed);
        for (int t = 0; t < 10; ++t) {
            BinaryControl w;
            for (std::size_t n = 0; n < c->inst.cells; ++n) {
                w.modes.push_back(std::uniform_int_distribution<int>(0, c->inst.modes - 1)(rng));
            }
            CHECK(objective_value(c->inst, w) == objective_value(flipped, w));
        }
    }
}

TEST_CASE("switch-cost matrix") {
    const ControlField a = support::constant_field(1, 2, {"1/3", "1/3", "1/3"});
    ScarpInstance inst = build_instance(a, support::grid_1d({2, 2, 1}), q("1"));
    inst.switch_matrix = std::vector<std::vector<Rational>>{
        {Rational(0), Rational(1), Rational(5)}, {Rational(1), Rational(0), Rational(2)}, {Rational(5), Rational(2), Rational(0)}};
    inst.validate();
    CHECK(objective_value(inst, BinaryControl{{0, 2, 1}}) == 7);
    CHECK_THROWS_AS(export_lp(inst), Error);
    (*inst.switch_matrix)[0][0] = 1;
    CHECK_THROWS_AS(inst.validate(), Error);
}

TEST_CASE("LP export structure") {
    const ControlField a = support::constant_field(1, 1, {"0.5", "0.5"});
    const ScarpInstance single = build_instance(a, initial_grid(a.domain(), 0), q("1"));
    const auto lp1 = oracle::parse_lp(export_lp(single));
    CHECK(lp1.objective.size() == 1);
    CHECK(lp1.objective.begin()->second == 0.0);
    CHECK(std::count_if(lp1.rows.begin(), lp1.rows.end(), [](const oracle::LpRow& r) {
              return r.name.rfind("onehot_", 0) == 0 && r.sense == "=";
          }) == 1);

    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto c = support::small_case(seed, 16);
        if (!c) {
            continue;
        }
        const auto cuts = separate_all(c->inst, relaxed_point(c->alpha, c->grid));
        const std::string text = export_lp(c->inst, cuts);
        CHECK(text == export_lp(c->inst, cuts));
        const auto lp = oracle::parse_lp(text);
        std::size_t s_vars = 0;
        for (const auto& [v, coef] : lp.objective) {
            s_vars += v.rfind("s_", 0) == 0 ? 1 : 0;
        }
        CHECK(s_vars == c->inst.adjacency.pairs.size() * static_cast<std::size_t>(c->inst.modes));
        CHECK(lp.binaries.size() == c->inst.cells * static_cast<std::size_t>(c->inst.modes));
        oracle::each_assignment(c->inst.cells, c->inst.modes, [&](const BinaryControl& w) {
            const auto x = oracle::lp_point(c->inst, w);
            const bool cuts_ok = std::all_of(cuts.begin(), cuts.end(), [&](const Cut& k) { return k.satisfied_by(w); });
            CHECK(oracle::lp_feasible(lp, x) == (is_feasible(c->inst, w) && cuts_ok));
            if (!s_vars) {
                return;
            }
            CHECK(oracle::lp_objective(lp, x) == doctest::Approx(to_double(objective_value(c->inst, w))));
        });
    }
}

TEST_CASE("lattice cut example") {
    // weights (1,1,2), prefix 3 pinned to 2
    const ScarpInstance inst = manual({0, 0, 1}, {0, 0, 2}, {1, 2, 2});
    const auto cuts = separate_lattice(inst, point2({0.9, 0.1, 0.5}), 2, 0);
    REQUIRE(cuts.size() == 1);
    const Cut& cut = cuts[0];
    CHECK(cut.kind == CutKind::lattice);
    CHECK(cut.terms == std::vector<CutTerm>{{0, 0, -1}, {1, 0, 1}});
    CHECK(cut.sense == Sense::greater_equal);
    CHECK(cut.rhs == 0);  // (1 - w1) + w2 >= 1
    CHECK(cut.origin.fixing == std::vector<int>{1, 0});
    CHECK(cut.satisfied_by(BinaryControl{{1, 1, 0}}));
    CHECK(cut.satisfied_by(BinaryControl{{0, 0, 1}}));
    CHECK_FALSE(cut.satisfied_by(BinaryControl{{0, 1, 0}}));  // w1 = 1, w2 = 0 on mode 0
    CHECK(check_cut(inst, cut).valid);
}

TEST_CASE("no lattice cut on uniform weights or at feasible integral points") {
    const ScarpInstance uni = manual({0, 0, 0}, {0, 1, 1}, {1, 1, 2});
    for (std::size_t n = 0; n < 3; ++n) {
        CHECK(separate_lattice(uni, point2({0.5, 0.5, 0.5}), n, 0).empty());
    }
    const ScarpInstance inst = manual({0, 0, 1}, {0, 0, 2}, {1, 2, 2});
    CHECK(separate_lattice(inst, point2({1, 1, 0}), 2, 0).empty());
    CHECK(separate_lattice(inst, point2({0, 0, 1}), 2, 0).empty());
}

TEST_CASE("parity cut example") {
    // windows: prefix 1 in [0,1], prefix 3 pinned to 2 => 1 <= w2 + 2 w3 <= 2
    const ScarpInstance inst = manual({0, 0, 1}, {0, 0, 2}, {1, 2, 2});
    const auto res = separate_parity(inst, point2({1.0, 0.5, 0.25}), 0);
    CHECK_FALSE(res.infeasible);
    CHECK(contains(res.cuts, {{1, 0, 1}, {2, 0, 1}}, Sense::greater_equal, 1));
    for (const auto& c : res.cuts) {
        CHECK(check_cut(inst, c).valid);
    }
    const auto serial = separate_parity(inst, point2({1.0, 0.5, 0.25}), 0, {}, Exec::serial);
    CHECK(serial.cuts == res.cuts);
}

TEST_CASE("parity cuts on unit weights are the combined rows") {
    const ScarpInstance uni = manual({0, 0, 0}, {0, 1, 1}, {1, 1, 2});
    // combined row for cells 2..3: l_3 - u_1 = 0 <= w2 + w3 <= u_3 - l_1 = 2
    const auto res = separate_parity(uni, point2({0.2, 0.9, 0.9}), 0);
    for (const auto& c : res.cuts) {
        CHECK(c.origin.k == 0);
        const std::int64_t lo = uni.lo(0, c.origin.s - 1) - (c.origin.r ? uni.up(0, c.origin.r - 1) : 0);
        const std::int64_t hi = uni.up(0, c.origin.s - 1) - (c.origin.r ? uni.lo(0, c.origin.r - 1) : 0);
        CHECK(c.rhs == (c.origin.upper ? hi : lo));
        CHECK(c.terms.size() == c.origin.s - c.origin.r);
    }
}

TEST_CASE("empty difference window proves infeasibility") {
    ScarpInstance inst = manual({0, 0, 0}, {1, 1, 1}, {1, 1, 1});
    inst.upper[2] = 0;  // prefix 3 of mode 0 cannot go below prefix 1
    inst.lower[2] = 0;
    const auto res = separate_parity(inst, point2({1, 0, 0}), 0);
    CHECK(res.infeasible);
}

TEST_CASE("emitted cuts are valid and mutations are caught") {
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        const auto c = support::small_case(seed);
        if (!c) {
            continue;
        }
        for (const auto& cut : separate_all(c->inst, relaxed_point(c->alpha, c->grid))) {
            CHECK(check_cut(c->inst, cut).valid);
            Cut bad = cut;
            bad.rhs += bad.sense == Sense::greater_equal ? 1 : -1;
            // a tightened cut may still be valid; if not, a witness is produced
            const auto r = check_cut(c->inst, bad);
            if (!r.valid) {
                REQUIRE(r.violated_by);
                CHECK_FALSE(bad.satisfied_by(*r.violated_by));
                CHECK(is_feasible(c->inst, *r.violated_by));
            }
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("infeasible bounds are reported") {
    const ControlField a = support::constant_field(1, 1, {"0.5", "0.5"});
    CHECK_THROWS_AS(build_instance(a, initial_grid(a.domain(), 1), q("0.1")), InfeasibleError);
}
