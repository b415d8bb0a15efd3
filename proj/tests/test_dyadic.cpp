#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dilset/blueprint.hpp"
#include "dilset/dyadic.hpp"

using namespace dilset;

namespace {

DyadicSet random_set(std::mt19937& rng, int depth, int max_runs = 10) {
    const std::int64_t lo = DyadicSet::first_index(depth);
    const std::int64_t hi = DyadicSet::closing_index(depth);
    std::uniform_int_distribution<std::int64_t> cell(lo, hi);
    std::uniform_int_distribution<int> len(1, 6);
    std::uniform_int_distribution<int> count(0, max_runs);
    std::vector<Run> runs;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        const std::int64_t b = cell(rng);
        runs.push_back({b, std::min(hi + 1, b + len(rng))});
    }
    return DyadicSet(depth, std::move(runs));
}

// independent oracle: greedy minimal covering of the cell union by closed
// intervals of length 2^-j
std::int64_t greedy_covering(const DyadicSet& s, int j) {
    const double delta = std::exp2(-j);
    const double w = std::exp2(-s.depth());
    std::int64_t n = 0;
    double covered_up_to = -1.0;
    for (const Run& r : s.runs()) {
        for (std::int64_t c = r.begin; c < r.end; ++c) {
            const double cell_lo = c * w;
            const double cell_hi = cell_lo + w;
            while (covered_up_to < cell_hi - 1e-15) {
                const double start = std::max(cell_lo, covered_up_to);
                covered_up_to = start + delta;
                ++n;
            }
        }
    }
    return n;
}

}  // namespace

TEST_CASE("cell index helpers") {
    CHECK(DyadicSet::first_index(3) == 8);
    CHECK(DyadicSet::closing_index(3) == 16);
}

TEST_CASE("construction normalizes and validates") {
    DyadicSet s(4, {{20, 22}, {16, 18}, {18, 20}});
    CHECK(s.runs() == std::vector<Run>{{16, 22}});
    CHECK(s.cell_count() == 6);
    CHECK_THROWS_AS(DyadicSet(4, {{15, 17}}), PreconditionError);  // below 2^4
    CHECK_THROWS_AS(DyadicSet(4, {{30, 34}}), PreconditionError);  // past the closing cell
    CHECK_THROWS_AS(DyadicSet(4, {{20, 20}}), PreconditionError);
    CHECK(DyadicSet(4).empty());
}

TEST_CASE("covering number of the full interval") {
    const DyadicSet full = render(FullInterval{}, 10);
    CHECK(covering_number(full, 4) == 16);  // interval of length 1 needs 2^4 grid cells
    CHECK(covering_number(full, 0) == 1);
    CHECK(covering_number(full, 10) == 1024);
    CHECK_THROWS_AS(covering_number(full, 11), DepthError);
}

TEST_CASE("covering number of midpoint cantor block") {
    // 2^3 points separated by 4^-3 = 2^-6 > 2^-7
    const DyadicSet s = render(make_cantor_midpoints(0.25, 3), 10);
    CHECK(covering_number(s, 7) == 8);
}

TEST_CASE("covering number of a singleton cell") {
    const DyadicSet s(10, {{1536, 1537}});
    for (int j = 0; j <= 10; ++j) CHECK(covering_number(s, j) == 1);
}

TEST_CASE("restrict") {
    const DyadicSet full = render(FullInterval{}, 8);
    const DyadicSet left = restrict_to(full, DyadicWindow{1, 2});
    CHECK(left.runs() == std::vector<Run>{{256, 384}});  // [1, 1.5)

    const DyadicSet s(8, {{300, 310}});
    CHECK(restrict_to(s, DyadicWindow{1, 3}).empty());
    CHECK(restrict_to(s, whole_domain_window()) == s);

    // the whole-domain window keeps the closing cell
    const DyadicSet with_closing(8, {{300, 310}, {512, 513}});
    CHECK(restrict_to(with_closing, whole_domain_window()) == with_closing);
    // ... and so does the rightmost window of any level
    CHECK(restrict_to(with_closing, DyadicWindow{2, 7}).contains_cell(512));
}

TEST_CASE("union") {
    std::mt19937 rng(7);
    const DyadicSet s = random_set(rng, 9);
    CHECK(set_union(s, DyadicSet(9)) == s);
    CHECK(set_union(s, s) == s);

    const DyadicSet a(5, {{32, 48}});   // [1, 1.5)
    const DyadicSet b(5, {{48, 64}});   // [1.5, 2)
    CHECK(set_union(a, b).runs() == std::vector<Run>{{32, 64}});  // adjacency merged

    CHECK_THROWS_AS(set_union(a, DyadicSet(6)), DepthError);
}

TEST_CASE("affine_embed") {
    const DyadicSet full = render(FullInterval{}, 6);
    const DyadicSet half = affine_embed(full, 0);
    // 1 + x/2 maps [1,2) to [1.5, 2)
    CHECK(half.depth() == 7);
    CHECK(half.runs() == std::vector<Run>{{192, 256}});

    const DyadicSet one(6, {{64, 65}});  // the cell at 1
    const DyadicSet embedded = affine_embed(one, 0);
    CHECK(embedded.runs() == std::vector<Run>{{128 + 64, 128 + 65}});  // cell at 1.5

    // L=2: endpoints 1 + 2^-3 * [1,2) = [1.125, 1.25)
    const DyadicSet deep = affine_embed(full, 2);
    CHECK(deep.depth() == 9);
    CHECK(deep.runs() == std::vector<Run>{{512 + 64, 512 + 128}});
    CHECK(512 + 64 == static_cast<std::int64_t>(1.125 * 512));
    CHECK(512 + 128 == static_cast<std::int64_t>(1.25 * 512));

    CHECK_THROWS_AS(affine_embed(full, 40), DepthError);
}

TEST_CASE("serialization round-trip") {
    std::mt19937 rng(42);
    for (int i = 0; i < 200; ++i) {
        const DyadicSet s = random_set(rng, 3 + i % 14);
        CHECK(deserialize(serialize(s)) == s);
    }
    const DyadicSet empty(12);
    CHECK(serialize(empty) == "DYSET v1\ndepth 12\nruns 0\n");
    CHECK(deserialize(serialize(empty)) == empty);
}

TEST_CASE("parse errors are distinct") {
    auto kind_of = [](const std::string& text) {
        try {
            deserialize(text);
        } catch (const ParseError& e) {
            return e.kind();
        }
        return ParseError::Kind::BadJson;  // sentinel: no throw
    };
    CHECK(kind_of("DYSET v2\ndepth 3\nruns 0\n") == ParseError::Kind::BadHeader);
    CHECK(kind_of("DYSET v1\ndepth x\nruns 0\n") == ParseError::Kind::BadDepth);
    CHECK(kind_of("DYSET v1\ndepth 3\nrunz 0\n") == ParseError::Kind::BadRunCount);
    // overlapping
    CHECK(kind_of("DYSET v1\ndepth 3\nruns 2\n8 10\n9 11\n") == ParseError::Kind::BadRuns);
    // unsorted
    CHECK(kind_of("DYSET v1\ndepth 3\nruns 2\n12 13\n8 10\n") == ParseError::Kind::BadRuns);
    // adjacent (non-canonical)
    CHECK(kind_of("DYSET v1\ndepth 3\nruns 2\n8 10\n10 12\n") == ParseError::Kind::BadRuns);
    CHECK(kind_of("DYSET v1\ndepth 3\nruns 1\n4 6\n") == ParseError::Kind::OutOfRange);
    CHECK(kind_of("DYSET v1\ndepth 3\nruns 1\n8 10\njunk\n") == ParseError::Kind::TrailingData);
}

TEST_CASE("covering monotonicity and doubling") {
    std::mt19937 rng(1);
    for (int i = 0; i < 100; ++i) {
        const DyadicSet s = random_set(rng, 12);
        if (s.empty()) continue;
        for (int j = 0; j < 12; ++j) {
            const std::int64_t coarse = covering_number(s, j);
            const std::int64_t fine = covering_number(s, j + 1);
            CHECK(fine >= coarse);
            CHECK(fine <= 2 * coarse);
        }
    }
}

TEST_CASE("grid covering brackets the sliding covering within factor 2") {
    std::mt19937 rng(2);
    for (int i = 0; i < 60; ++i) {
        const DyadicSet s = random_set(rng, 10);
        if (s.empty()) continue;
        for (int j = 2; j <= 10; j += 2) {
            const std::int64_t grid = covering_number(s, j);
            const std::int64_t greedy = greedy_covering(s, j);
            CHECK(greedy <= grid);
            CHECK(grid <= 2 * greedy);
        }
    }
}

TEST_CASE("restriction and subadditivity bounds") {
    std::mt19937 rng(3);
    for (int i = 0; i < 100; ++i) {
        const DyadicSet s = random_set(rng, 10);
        const DyadicSet t = random_set(rng, 10);
        std::uniform_int_distribution<int> lvl(0, 8);
        const int level = lvl(rng);
        std::uniform_int_distribution<std::int64_t> idx(std::int64_t{1} << level,
                                                        (std::int64_t{2} << level) - 1);
        const DyadicWindow w{level, idx(rng)};
        for (int j = 4; j <= 10; j += 3) {
            CHECK(covering_number(restrict_to(s, w), j) <= covering_number(s, j));
            CHECK(covering_number(set_union(s, t), j) <=
                  covering_number(s, j) + covering_number(t, j));
        }
    }
}

TEST_CASE("max_window_count agrees with direct enumeration") {
    std::mt19937 rng(4);
    for (int i = 0; i < 80; ++i) {
        const DyadicSet s = random_set(rng, 9);
        if (s.empty()) continue;
        for (int j = 3; j <= 9; j += 3) {
            const std::vector<Run> cells = coarse_runs(s, j);
            for (int level = 0; level <= j; ++level) {
                std::int64_t expect = 0, expect_idx = 0;
                for (std::int64_t k = std::int64_t{1} << level;
                     k < (std::int64_t{2} << level); ++k) {
                    const std::int64_t cnt =
                        restrict_to(DyadicSet(j, cells), DyadicWindow{level, k}).cell_count();
                    if (cnt > expect) {
                        expect = cnt;
                        expect_idx = k;
                    }
                }
                const WindowCount got = max_window_count(cells, j, level);
                CHECK(got.count == expect);
                if (expect > 0) CHECK(got.index == expect_idx);
            }
        }
    }
}
