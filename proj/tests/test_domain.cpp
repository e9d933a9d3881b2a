#include "fdt/domain.hpp"

#include <random>

#include "doctest.h"
#include "fdt/error.hpp"
#include "oracles.hpp"

using namespace fdt;

TEST_CASE("remove matches the paper's withdrawals") {
    // Full domain minus the element withdrawal of Fig.-3 event 4.
    FiniteDomain full = FiniteDomain::full();
    FiniteDomain w = parse_domain("[0,4-268435455]");
    CHECK(format_domain(remove(full, w)) == "[1-3]");

    // Identity on empty withdrawal.
    FiniteDomain d = FiniteDomain::of({1, 2, 3});
    CHECK(remove(d, FiniteDomain()) == d);

    // Event 8: [2,5,7] minus [5,7].
    CHECK(format_domain(remove(FiniteDomain::of({2, 5, 7}),
                               FiniteDomain::of({5, 7}))) == "[2]");
}

TEST_CASE("remove against the bitset oracle") {
    std::mt19937 rng(7001);
    for (int iter = 0; iter < 500; ++iter) {
        FiniteDomain d = oracle::random_domain(rng, 40);
        FiniteDomain w = oracle::random_domain(rng, 40);
        FiniteDomain got = remove(d, w);
        CHECK(got == oracle::from_bits(oracle::to_bits(d) &
                                       ~oracle::to_bits(w)));
        // remove(d,w) ∪ (d ∩ w) = d and remove(d,w) ∩ w = ∅.
        CHECK(got.unite(d.intersect(w)) == d);
        CHECK(got.intersect(w).empty());
    }
}

TEST_CASE("intersect and unite against the bitset oracle") {
    std::mt19937 rng(7002);
    for (int iter = 0; iter < 300; ++iter) {
        FiniteDomain a = oracle::random_domain(rng, 50);
        FiniteDomain b = oracle::random_domain(rng, 50);
        CHECK(a.intersect(b) ==
              oracle::from_bits(oracle::to_bits(a) & oracle::to_bits(b)));
        CHECK(a.unite(b) ==
              oracle::from_bits(oracle::to_bits(a) | oracle::to_bits(b)));
    }
}

TEST_CASE("interval normalization") {
    FiniteDomain d = FiniteDomain::from_intervals({{5, 7}, {1, 2}, {3, 4}});
    CHECK(d.intervals().size() == 1);  // 1-2,3-4,5-7 are adjacent
    CHECK(format_domain(d) == "[1-7]");

    std::mt19937 rng(7003);
    for (int iter = 0; iter < 200; ++iter) {
        FiniteDomain a = oracle::random_domain(rng, 30);
        FiniteDomain b = oracle::random_domain(rng, 30);
        for (const FiniteDomain& r :
             {a.minus(b), a.intersect(b), a.unite(b)}) {
            const auto& ivs = r.intervals();
            for (std::size_t i = 0; i < ivs.size(); ++i) {
                CHECK(ivs[i].lo <= ivs[i].hi);
                if (i) CHECK(ivs[i].lo > ivs[i - 1].hi + 1);
            }
        }
    }
}

TEST_CASE("size, min, max, contains") {
    FiniteDomain d = parse_domain("[0-1,3-4,6,8-268435455]");
    CHECK(d.size() == 2 + 2 + 1 + (268435455 - 8 + 1));
    CHECK(d.min() == 0);
    CHECK(d.max() == 268435455);
    CHECK(d.contains(6));
    CHECK(!d.contains(7));
    CHECK(!d.contains(2));
    CHECK(FiniteDomain().size() == 0);
}

TEST_CASE("classify_update on the documented cases") {
    auto classify = [](const char* o, const char* n) {
        return format_mods(classify_update(parse_domain(o), parse_domain(n)));
    };
    CHECK(classify("[0-268435455]", "[1-3]") == "[min,max]");
    CHECK(classify("[2,5,7]", "[2]") == "[max,ground]");
    CHECK(classify("[1-3]", "[]") == "[empty]");
    CHECK(classify("[1-3]", "[1,3]") == "[any]");
    CHECK(classify("[2,5,7]", "[5]") == "[min,max,ground]");
}

TEST_CASE("classify_update rejects contract violations") {
    CHECK_THROWS_AS(classify_update(FiniteDomain::of({1, 2}),
                                    FiniteDomain::of({1, 2})),
                    std::logic_error);
    CHECK_THROWS_AS(classify_update(FiniteDomain::of({1, 2}),
                                    FiniteDomain::of({3})),
                    std::logic_error);
}

TEST_CASE("classify_update invariants") {
    std::mt19937 rng(7004);
    int done = 0;
    while (done < 300) {
        FiniteDomain old_dom = oracle::random_domain(rng, 25, false);
        FiniteDomain new_dom =
            old_dom.intersect(oracle::random_domain(rng, 25));
        if (new_dom == old_dom) continue;
        ++done;
        auto mods = classify_update(old_dom, new_dom);
        CHECK(!mods.empty());
        bool has_empty = std::find(mods.begin(), mods.end(),
                                   UpdateKind::Empty) != mods.end();
        bool has_ground = std::find(mods.begin(), mods.end(),
                                    UpdateKind::Ground) != mods.end();
        CHECK(has_empty == new_dom.empty());
        if (has_empty) CHECK(mods.size() == 1);
        CHECK(has_ground == (new_dom.size() == 1));
        // Canonical declaration order.
        CHECK(std::is_sorted(mods.begin(), mods.end()));
    }
}

TEST_CASE("format_domain canonical forms") {
    CHECK(format_domain(parse_domain("[0-1,3-4,6,8-268435455]")) ==
          "[0-1,3-4,6,8-268435455]");
    CHECK(format_domain(FiniteDomain()) == "[]");
    CHECK(format_domain(FiniteDomain::singleton(5)) == "[5]");
    CHECK(parse_domain("[1,2,3]") == FiniteDomain::of({1, 2, 3}));
    CHECK(format_domain(FiniteDomain::of({1, 2, 3})) == "[1-3]");
}

TEST_CASE("domain text round-trips") {
    std::mt19937 rng(7005);
    for (int iter = 0; iter < 300; ++iter) {
        FiniteDomain d = oracle::random_domain(rng, 45);
        CHECK(parse_domain(format_domain(d)) == d);
    }
    // Boundary values.
    FiniteDomain edge = parse_domain("[0,268435455]");
    CHECK(parse_domain(format_domain(edge)) == edge);
}

TEST_CASE("parse_domain rejects malformed text with positions") {
    CHECK_THROWS_AS(parse_domain("1-3"), ParseError);
    CHECK_THROWS_AS(parse_domain("[1-3"), ParseError);
    CHECK_THROWS_AS(parse_domain("[3-1]"), ParseError);
    CHECK_THROWS_AS(parse_domain("[1-3]x"), ParseError);
    CHECK_THROWS_AS(parse_domain("[a]"), ParseError);
    // Non-canonical but grammatical input normalizes.
    CHECK(parse_domain("[2,1]") == FiniteDomain::of({1, 2}));
    CHECK(format_domain(parse_domain("[1,2-4]")) == "[1-4]");
    try {
        parse_domain("[1,x]");
    } catch (const ParseError& e) {
        CHECK(e.column() == 4);
    }
}

TEST_CASE("mods text round-trips") {
    CHECK(parse_mods("[min,max]") ==
          std::vector<UpdateKind>{UpdateKind::Min, UpdateKind::Max});
    CHECK(format_mods(parse_mods("[empty]")) == "[empty]");
    CHECK_THROWS_AS(parse_mods("[bogus]"), ParseError);
}
