#include <random>

#include "doctest.h"

#include "ciagrid/control.hpp"
#include "ciagrid/json_io.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ciagrid;
using support::q;

TEST_CASE("cell integral examples") {
    const ControlField a = support::constant_field(1, 2, {"0.6", "0.4"});
    const Grid root = initial_grid(a.domain(), 0);
    CHECK(cell_integral(a, root.cell(0)) == std::vector<Rational>{q("0.6"), q("0.4")});
    const Grid halves = initial_grid(a.domain(), 1);
    CHECK(cell_integral(a, halves.cell(0)) == std::vector<Rational>{q("0.3"), q("0.2")});

    const ControlField b = support::field(1, 2, {{"1", "0"}, {"0", "1"}, {"1", "0"}, {"0", "1"}});
    CHECK(cell_integral(b, halves.cell(0)) == std::vector<Rational>{q("1/4"), q("1/4")});

    Cell too_deep;
    too_deep.depth = 3;
    CHECK_THROWS_AS(cell_integral(b, too_deep), Error);
}

TEST_CASE("non-binariness examples") {
    const Grid halves = initial_grid(Domain::unit_box(1), 1);
    CHECK(nonbinariness(support::constant_field(1, 1, {"1", "0"}), halves.cell(0)) == 0);
    CHECK(nonbinariness(support::constant_field(1, 1, {"0.5", "0.5"}), initial_grid(Domain::unit_box(1), 0).cell(0)) ==
          q("0.5"));
    CHECK(nonbinariness(support::constant_field(1, 1, {"0.6", "0.4"}), halves.cell(0)) == q("0.2"));
}

TEST_CASE("pseudometric examples") {
    const ControlField a = support::constant_field(1, 1, {"0.6", "0.4"});
    const Grid halves = initial_grid(a.domain(), 1);
    CHECK(pseudometric(a, BinaryControl{{0, 1}}, halves) == q("0.2"));

    const ControlField onehot = support::field(1, 1, {{"1", "0"}, {"0", "1"}});
    CHECK(pseudometric(onehot, BinaryControl{{0, 1}}, halves) == 0);
    CHECK(pseudometric(onehot, BinaryControl{{1, 1}}, halves) == q("0.5"));
    CHECK_THROWS_AS(pseudometric(a, BinaryControl{{0}}, halves), Error);
}

TEST_CASE("integrals, non-binariness and distance agree with the oracle") {
    std::mt19937_64 rng(5);
    for (int dim = 1; dim <= 3; ++dim) {
        const int L = dim == 3 ? 2 : (dim == 2 ? 3 : 5);
        for (int trial = 0; trial < 4; ++trial) {
            const ControlField a = random_field(dim, 3, L, 6, 0.4, rng);
            const Grid g = random_grid(a.domain(), L, 30, rng);
            const auto nb = nonbinariness_all(a, g, Exec::parallel);
            CHECK(nb == nonbinariness_all(a, g, Exec::serial));
            BinaryControl w;
            for (std::size_t n = 0; n < g.size(); ++n) {
                CHECK(cell_integral(a, g.cell(n)) == oracle::integral(a, g.cell(n)));
                CHECK(nonbinariness(a, g.cell(n)) == oracle::nonbinariness(a, g.cell(n)));
                CHECK(a.to_measure(nb[n]) == oracle::nonbinariness(a, g.cell(n)));
                CHECK(nonbinariness(a, g.cell(n)) <= g.volume(n));
                w.modes.push_back(std::uniform_int_distribution<int>(0, 2)(rng));
            }
            CHECK(pseudometric(a, w, g) == oracle::pseudometric(a, w, g));
        }
    }
}

TEST_CASE("integral is additive over children") {
    std::mt19937_64 rng(9);
    const ControlField a = random_field(2, 2, 3, 8, 0.2, rng);
    Grid g = initial_grid(a.domain(), 1);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const Grid s = split_cell(g, n);
        std::vector<Rational> sum(2, Rational(0));
        for (std::size_t c = n; c < n + 4; ++c) {
            const auto in = cell_integral(a, s.cell(c));
            sum[0] += in[0];
            sum[1] += in[1];
        }
        CHECK(sum == cell_integral(a, g.cell(n)));
    }
}

TEST_CASE("pseudometric axioms on cellwise constant controls") {
    // For one-hot fields that are constant on the cells of g, d is the
    // prefix max-norm of the difference of two mode sequences.
    std::mt19937_64 rng(21);
    const Grid g = random_grid(Domain::unit_box(2), 2, 10, rng);
    auto as_field = [&](const BinaryControl& w) {
        std::vector<std::vector<Rational>> rows(16, std::vector<Rational>(3, Rational(0)));
        for (std::uint64_t z = 0; z < 16; ++z) {
            for (std::size_t n = 0; n < g.size(); ++n) {
                if (oracle::inside(oracle::ref_axes(z, 2, 2), 2, g.cell(n))) {
                    rows[z][static_cast<std::size_t>(w.modes[n])] = 1;
                }
            }
        }
        return ControlField(Domain::unit_box(2), 3, 2, rows);
    };
    auto draw = [&] {
        BinaryControl w;
        for (std::size_t n = 0; n < g.size(); ++n) {
            w.modes.push_back(std::uniform_int_distribution<int>(0, 2)(rng));
        }
        return w;
    };
    for (int t = 0; t < 30; ++t) {
        const BinaryControl x = draw(), y = draw(), z = draw();
        const Rational dxy = pseudometric(as_field(x), y, g);
        CHECK(dxy >= 0);
        CHECK(pseudometric(as_field(x), x, g) == 0);
        CHECK(dxy == pseudometric(as_field(y), x, g));
        CHECK(pseudometric(as_field(x), z, g) <= dxy + pseudometric(as_field(y), z, g));
    }
}

TEST_CASE("simplex and mask validation") {
    CHECK_THROWS_AS(support::constant_field(1, 1, {"0.6", "0.5"}), Error);
    CHECK_THROWS_AS(support::constant_field(1, 1, {"1.2", "-0.2"}), Error);
    std::vector<std::vector<Rational>> rows{{q("0.5"), q("0.5")}, {q("1"), q("0")}};
    CHECK_THROWS_AS(ControlField(Domain::unit_box(1), 2, 1, rows, {false, true}), Error);
    CHECK_NOTHROW(ControlField(Domain::unit_box(1), 2, 1, rows, {true, false}));
}

TEST_CASE("instance json: decimals are exact, row-major maps to Z-order") {
    const auto j = parse_json_exact(R"({"domain":{"dim":2,"origin":[0,0],"lengths":[1,1]},"M":2,"L":1,
        "order":"row-major","alpha":[[0.1,0.9],["1/3","2/3"],[1,0],[0,1]]})");
    const ControlField a = control_from_json(j);
    CHECK(a.value(0, 0) == q("1/10"));
    CHECK(a.value(1, 0) == q("1/3"));  // (1,0) is Z-order 1
    CHECK(a.value(2, 0) == 1);         // (0,1) is Z-order 2
    const ControlField back = control_from_json(parse_json_exact(control_to_json(a).dump()));
    for (std::size_t r = 0; r < 4; ++r) {
        CHECK(back.value(r, 0) == a.value(r, 0));
    }
    CHECK(binary_control_from_json(binary_control_to_json(BinaryControl{{0, 2, 1}})) == BinaryControl{{0, 2, 1}});
}
