#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dilset/blueprint.hpp"
#include "dilset/characteristics.hpp"

using namespace dilset;

TEST_CASE("middle cantor with mu = 1/2 reproduces the window") {
    for (int depth : {4, 9, 15}) {
        const DyadicSet s = render(make_cantor_middle(0.5, 5), depth);
        // the closed interval [1,2]: every grid cell plus the closing cell
        CHECK(s.runs() == std::vector<Run>{{DyadicSet::first_index(depth),
                                            DyadicSet::closing_index(depth) + 1}});
    }
}

TEST_CASE("first-generation midpoints of the quarter construction") {
    const DyadicSet s = render(make_cantor_midpoints(0.25, 1), 6);
    // generation-1 intervals [1,1.25], [1.75,2]; midpoints 1.125 and 1.875
    CHECK(s.runs() == std::vector<Run>{{72, 73}, {120, 121}});
}

TEST_CASE("singleton renders to one cell") {
    const DyadicSet s = render(SingletonPoint{1.5}, 8);
    CHECK(s.cell_count() == 1);
    CHECK(s.contains_cell(384));
}

TEST_CASE("midpoint count is exact below the generation scale") {
    for (double mu : {0.25, 1.0 / 3.0, 0.45}) {
        for (int m : {0, 1, 4, 9}) {
            const long double delta_m = std::pow(static_cast<long double>(mu), m);
            const int depth = std::min(30, static_cast<int>(std::ceil(-std::log2(delta_m))) + 2);
            const DyadicSet s = render(make_cantor_midpoints(mu, m), depth);
            CHECK(covering_number(s, depth) == (std::int64_t{1} << m));
        }
    }
}

TEST_CASE("assouad regular parameters") {
    const Blueprint bp = assouad_regular_raw(0.5, 1.0, 8);
    const RegularFamilyInfo info = family_info(bp);
    CHECK(info.lambda == doctest::Approx(0.25));
    CHECK(info.mu == doctest::Approx(0.5));
    CHECK(info.theta == doctest::Approx(0.5));
    CHECK(info.generation(1) == 2);
    CHECK(info.generation(3) == 6);  // m(k) = 2k

    const RegularFamilyInfo info2 = family_info(assouad_regular_raw(0.5, 0.8, 8));
    CHECK(info2.theta == doctest::Approx(0.375));
    CHECK(info2.generation(1) == 3);

    CHECK_THROWS_AS(assouad_regular_raw(0.8, 0.5, 8), PreconditionError);
    CHECK_THROWS_AS(assouad_regular_raw(0.5, 0.5, 8), PreconditionError);
    CHECK_THROWS_AS(assouad_regular_raw(0.0, 0.5, 8), PreconditionError);
}

TEST_CASE("sigma_k") {
    const Blueprint bp = assouad_regular_raw(0.5, 1.0, 8);
    // |J_1| = lambda - lambda^2 = 3/16, sigma_1 = (3/16) * (1/2)^2 = 3/64
    CHECK(static_cast<double>(sigma_k(bp, 1)) == doctest::Approx(3.0 / 64).epsilon(1e-13));
    CHECK_THROWS_AS(sigma_k(bp, 0), PreconditionError);
    CHECK_THROWS_AS(sigma_k(bp, 9), PreconditionError);

    // block-length inequality: (mu/2)^theta * 2^(-k/beta) <= sigma_k^theta <= 2^(-k/beta)
    const Blueprint bp2 = assouad_regular_raw(0.5, 0.8, 8);
    const RegularFamilyInfo info = family_info(bp2);
    for (int k = 1; k <= 8; ++k) {
        const long double st = std::pow(sigma_k(bp2, k), info.theta);
        const long double upper = std::exp2(-k / 0.5L);
        const long double lower = std::pow(info.mu / 2.0L, info.theta) * upper;
        CHECK(static_cast<double>(st) <= static_cast<double>(upper) * (1 + 1e-12));
        CHECK(static_cast<double>(st) >= static_cast<double>(lower) * (1 - 1e-12));
    }
}

TEST_CASE("block identity at the block scale") {
    // N(F cap J_k, sigma_k) = 2^m(k), checked at the nearest dyadic scale
    const Blueprint bp = assouad_regular_raw(0.5, 0.8, 6);
    const RegularFamilyInfo info = family_info(bp);
    const int depth = 24;
    const DyadicSet f = render(bp, depth);
    for (int k = 1; k <= 3; ++k) {
        const long double sk = sigma_k(bp, k);
        const int j = static_cast<int>(std::ceil(-std::log2(sk)));
        REQUIRE(j <= depth);
        // window: dyadic cover of J_k at the level of its length
        const Interval jk = info.block(k);
        const int level = static_cast<int>(std::floor(-std::log2(jk.b - jk.a)));
        std::int64_t count = 0;
        for (std::int64_t idx = std::int64_t{1} << level; idx < (std::int64_t{2} << level);
             ++idx) {
            const double lo = static_cast<double>(idx) * std::exp2(-level);
            const double hi = lo + std::exp2(-level);
            if (hi <= jk.a || lo >= jk.b) continue;
            count += covering_number(restrict_to(f, DyadicWindow{level, idx}), j);
        }
        const auto expected = static_cast<double>(std::int64_t{1} << info.generation(k));
        CHECK(static_cast<double>(count) >= expected / 2);
        CHECK(static_cast<double>(count) <= expected * 2);
    }
}

TEST_CASE("calibration") {
    // full-interval analog at beta = 1: max_j 2^-j * N == 1 exactly
    const DyadicSet full = render(FullInterval{}, 16);
    double chi = 0.0;
    for (int j = 1; j <= 16; ++j)
        chi = std::max(chi, std::exp2(-j) * static_cast<double>(covering_number(full, j)));
    CHECK(chi == 1.0);

    // max over a larger scale set can only grow
    const double c20 = calibrate_cf(0.5, 0.8, 8, 20);
    const double c24 = calibrate_cf(0.5, 0.8, 8, 24);
    CHECK(c20 >= 1.0);
    CHECK(c24 >= c20);
}

TEST_CASE("uniform family stays in [1,2] and translates identically at c_f = 1") {
    const Blueprint raw = assouad_regular_raw(0.5, 0.8, 6);
    const Blueprint forced = AssouadRegularScaled{0.5, 0.8, 6, 1.0};
    for (int depth : {10, 16}) {
        CHECK(render(raw, depth) == render(forced, depth));
    }

    const Blueprint scaled = uniform_family(0.5, 0.8, 6, 18);
    const DyadicSet s = render(scaled, 18);
    CHECK(!s.empty());
    // contained in [1,2] by construction of the grid; scaled lies inside raw's hull
    CHECK(s.runs().front().begin >= DyadicSet::first_index(18));
    CHECK(s.runs().back().end <= DyadicSet::closing_index(18) + 1);

    // minkowski characteristic bounded by 2 after calibration
    for (int j = 1; j <= 18; ++j)
        CHECK(minkowski_characteristic(s, 0.5, j) <= 2.0 + 1e-12);
}

TEST_CASE("zero minkowski blueprints") {
    CHECK(render(zero_minkowski(0.0, 4), 10).cell_count() == 1);
    CHECK_THROWS_AS(zero_minkowski(-0.1, 4), PreconditionError);
    CHECK_THROWS_AS(zero_minkowski(1.3, 4), PreconditionError);

    // G_1 = {1 + 2^-sqrt(l)}: distinct points while resolvable
    const DyadicSet g1 = render(zero_minkowski(1.0, 40), 12);
    CHECK(g1.cell_count() >= 8);

    // log-type covering growth of G_(1/2)
    const DyadicSet g = render(zero_minkowski(0.5, 6), 24);
    for (int j = 2; j <= 24; ++j)
        CHECK(covering_number(g, j) <= 2 * j + 8);
}

TEST_CASE("l_sequence") {
    CHECK(l_sequence({1, 1, 1, 1}, 1) == std::vector<long long>{1, 2, 3, 4});
    CHECK(l_sequence({0.5, 0.5, 0.5, 0.5}, 0) == std::vector<long long>{0, 2, 4, 6});
    CHECK(l_sequence({0.7}, 3) == std::vector<long long>{3});
    CHECK_THROWS_AS(l_sequence({}, 1), PreconditionError);
    CHECK_THROWS_AS(l_sequence({0.5, -1.0}, 1), PreconditionError);

    CHECK(l_sequence_valid({1, 1, 1}, {1, 2, 3}));
    CHECK(!l_sequence_valid({0.5, 0.5}, {0, 1}));  // needs a step of 2
}

TEST_CASE("theorem union") {
    // single pair, L = [0]: an affine copy inside [1.5, 2]
    const Blueprint bp = theorem_union({{0.5, 0.8}}, {0}, 6, 14);
    const DyadicSet s = render(bp, 16);
    CHECK(!s.empty());
    const double lo = static_cast<double>(s.runs().front().begin) * std::exp2(-16);
    const double hi = static_cast<double>(s.runs().back().end) * std::exp2(-16);
    CHECK(lo >= 1.5);
    CHECK(hi <= 2.0 + 1e-12);

    // two identical pairs at different shifts
    const Blueprint two = theorem_union({{0.5, 0.8}, {0.5, 0.8}}, l_sequence({0.8, 0.8}, 1), 6,
                                        14);
    const DyadicSet s2 = render(two, 18);
    CHECK(covering_number(s2, 4) >= 2);

    // L violating the growth condition is rejected
    CHECK_THROWS_AS(theorem_union({{0.5, 0.8}, {0.5, 0.8}}, {1, 1}, 6, 14), PreconditionError);
    CHECK_THROWS_AS(theorem_union({{0.9, 0.8}}, {1}, 6, 14), PreconditionError);
}

TEST_CASE("blueprint json round-trips") {
    const std::vector<Blueprint> bps = {
        FullInterval{},
        SingletonPoint{1.25},
        make_cantor_middle(0.25, 7),
        make_cantor_midpoints(1.0 / 3.0, 5, {1.25L, 1.75L}),
        assouad_regular_raw(0.4, 0.9, 5),
        AssouadRegularScaled{0.4, 0.9, 5, 1.75},
        zero_minkowski(0.5, 5),
        theorem_union({{0.5, 0.8}, {0.3, 0.9}}, l_sequence({0.8, 0.9}, 1), 5, 12),
    };
    for (const Blueprint& bp : bps) {
        const Blueprint back = blueprint_from_json(blueprint_to_json(bp));
        CHECK(render(back, 12) == render(bp, 12));
    }
    CHECK_THROWS_AS(blueprint_from_json("{"), ParseError);
    CHECK_THROWS_AS(blueprint_from_json(R"({"variant":"nope","params":{}})"), ParseError);
    CHECK_THROWS_AS(
        blueprint_from_json(
            R"({"variant":"assouad_regular_raw","params":{"beta":0.9,"gamma":0.5,"k_max":4}})"),
        PreconditionError);
}
