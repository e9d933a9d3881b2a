#include "fdt/constraint.hpp"

#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace fdt;

namespace {

ConstraintDef make(ConstraintKind kind, VarId a, VarId b, int offset = 0,
                   std::vector<int> table = {}) {
    ConstraintDef c;
    c.id = ConstraintId{1};
    c.kind = kind;
    c.vars = {a, b};
    c.offset = offset;
    c.table = std::move(table);
    return c;
}

const VarId v1{1};
const VarId v2{2};

ConstraintDef random_constraint(std::mt19937& rng) {
    std::uniform_int_distribution<int> kind_pick(0, 3);
    std::uniform_int_distribution<int> offset_pick(-5, 5);
    std::uniform_int_distribution<int> len_pick(1, 6);
    std::uniform_int_distribution<int> val_pick(0, 10);
    switch (kind_pick(rng)) {
        case 0: return make(ConstraintKind::Gt, v1, v2);
        case 1: return make(ConstraintKind::Eq, v1, v2);
        case 2:
            return make(ConstraintKind::NeqOffset, v1, v2, offset_pick(rng));
        default: {
            std::vector<int> table;
            int len = len_pick(rng);
            for (int i = 0; i < len; ++i) table.push_back(val_pick(rng));
            return make(ConstraintKind::Element, v1, v2, 0, std::move(table));
        }
    }
}

}  // namespace

TEST_CASE("delta reproduces the documented withdrawals") {
    DomainMap d;

    // gt over {1..3}: x cannot take the value 1.
    d[v1] = FiniteDomain::range(1, 3);
    d[v2] = FiniteDomain::range(1, 3);
    auto gt = make(ConstraintKind::Gt, v1, v2);
    CHECK(format_domain(delta(gt, v1, d)) == "[1]");
    CHECK(format_domain(delta(gt, v2, d)) == "[3]");

    // eq(v2,v1) with v2 in {2,5,7}, v1 in {1..3}: W(v2) = [5,7].
    d[v2] = FiniteDomain::of({2, 5, 7});
    auto eq = make(ConstraintKind::Eq, v2, v1);
    CHECK(format_domain(delta(eq, v2, d)) == "[5,7]");

    // element(v1,[2,5,7],v2) on full domains: the index keeps 1..3.
    d[v1] = FiniteDomain::full();
    d[v2] = FiniteDomain::full();
    auto el = make(ConstraintKind::Element, v1, v2, 0, {2, 5, 7});
    CHECK(format_domain(delta(el, v1, d)) == "[0,4-268435455]");
    CHECK(format_domain(delta(el, v2, d)) == "[0-1,3-4,6,8-268435455]");
}

TEST_CASE("element delta with a ground value variable") {
    // With v1 in 1..3 and v2 = {2}, only index 1 has support (L[1] = 2);
    // computed with the cross-product oracle and frozen here.
    DomainMap d;
    d[v1] = FiniteDomain::range(1, 3);
    d[v2] = FiniteDomain::singleton(2);
    auto el = make(ConstraintKind::Element, v1, v2, 0, {2, 5, 7});

    auto support = oracle::supported_values(el, d);
    FiniteDomain oracle_w = d[v1].minus(FiniteDomain::from_values(
        std::vector<int>(support[v1].begin(), support[v1].end())));
    CHECK(format_domain(oracle_w) == "[2-3]");
    CHECK(delta(el, v1, d) == oracle_w);
}

TEST_CASE("delta on empty input domains is empty") {
    DomainMap d;
    d[v1] = FiniteDomain();
    d[v2] = FiniteDomain::of({1});
    auto eq = make(ConstraintKind::Eq, v1, v2);
    CHECK(delta(eq, v1, d).empty());
    CHECK(delta(eq, v2, d).empty());
}

TEST_CASE("neq_offset fires only on ground sides") {
    DomainMap d;
    d[v1] = FiniteDomain::range(1, 5);
    d[v2] = FiniteDomain::singleton(2);
    auto neq = make(ConstraintKind::NeqOffset, v1, v2, 1);  // v1 != v2+1
    CHECK(format_domain(delta(neq, v1, d)) == "[3]");
    CHECK(delta(neq, v2, d).empty());  // v1 not ground

    d[v2] = FiniteDomain::of({2, 4});
    CHECK(delta(neq, v1, d).empty());
}

TEST_CASE("unsatisfiable on the documented cases") {
    DomainMap d;
    d[v1] = FiniteDomain::singleton(2);
    d[v2] = FiniteDomain::singleton(2);
    // I cannot be the rank of A when both are 2: rank of 2 is 1.
    auto el = make(ConstraintKind::Element, v1, v2, 0, {2, 5, 7});
    CHECK(unsatisfiable(el, d));

    d[v1] = FiniteDomain::range(1, 3);
    d[v2] = FiniteDomain::range(1, 3);
    auto gt = make(ConstraintKind::Gt, v1, v2);
    CHECK(!unsatisfiable(gt, d));

    d[v1] = FiniteDomain();
    d[v2] = FiniteDomain::singleton(1);
    auto eq = make(ConstraintKind::Eq, v1, v2);
    CHECK(unsatisfiable(eq, d));
}

TEST_CASE("no_reduction on the documented cases") {
    DomainMap d;
    d[v1] = FiniteDomain::range(1, 3);
    d[v2] = FiniteDomain::of({2, 5, 7});
    auto el = make(ConstraintKind::Element, v1, v2, 0, {2, 5, 7});
    CHECK(no_reduction(el, d));

    // gt with x in 2..3, y in 1..2: both deltas empty (checked against
    // the support oracle below as well).
    d[v1] = FiniteDomain::range(2, 3);
    d[v2] = FiniteDomain::range(1, 2);
    auto gt = make(ConstraintKind::Gt, v1, v2);
    CHECK(delta(gt, v1, d).empty());
    CHECK(delta(gt, v2, d).empty());
    CHECK(no_reduction(gt, d));
    auto support = oracle::supported_values(gt, d);
    CHECK(support[v1].size() == 2);
    CHECK(support[v2].size() == 2);

    d[v1] = FiniteDomain::of({1, 2});
    d[v2] = FiniteDomain::of({2, 3});
    auto eq = make(ConstraintKind::Eq, v1, v2);
    CHECK(!no_reduction(eq, d));
}

TEST_CASE("wake_condition follows the subscription table") {
    auto el = make(ConstraintKind::Element, v1, v2, 0, {2, 5, 7});
    ChangeRecord rec;
    rec.note(v2, kind_set({UpdateKind::Max, UpdateKind::Ground}));
    CHECK(wake_condition(el, rec));

    ChangeRecord none;
    CHECK(!wake_condition(el, none));
    CHECK(!wake_condition(make(ConstraintKind::Gt, v1, v2), none));

    // neq subscribes to ground/empty only.
    auto neq = make(ConstraintKind::NeqOffset, v1, v2, 0);
    ChangeRecord any_only;
    any_only.note(v1, kind_set({UpdateKind::Any}));
    CHECK(!wake_condition(neq, any_only));
    ChangeRecord ground;
    ground.note(v1, kind_set({UpdateKind::Ground}));
    CHECK(wake_condition(neq, ground));

    // gt ignores interior removals but reacts to bounds.
    auto gt = make(ConstraintKind::Gt, v1, v2);
    CHECK(!wake_condition(gt, any_only));
    ChangeRecord min_change;
    min_change.note(v2, kind_set({UpdateKind::Min}));
    CHECK(wake_condition(gt, min_change));
}

TEST_CASE("delta soundness and containment against the support oracle") {
    std::mt19937 rng(8101);
    for (int iter = 0; iter < 400; ++iter) {
        ConstraintDef c = random_constraint(rng);
        DomainMap d;
        d[v1] = oracle::random_domain(rng, 10, false);
        d[v2] = oracle::random_domain(rng, 10, false);
        auto support = oracle::supported_values(c, d);
        for (VarId x : {v1, v2}) {
            FiniteDomain w = delta(c, x, d);
            CHECK(w.subset_of(d[x]));
            // No withdrawn value has support.
            for (int val : w.values()) CHECK(!support[x].count(val));
            if (c.kind == ConstraintKind::Eq ||
                c.kind == ConstraintKind::Element) {
                // Arc-consistent kinds withdraw exactly the unsupported.
                FiniteDomain unsupported = d[x].minus(
                    FiniteDomain::from_values(std::vector<int>(
                        support[x].begin(), support[x].end())));
                CHECK(w == unsupported);
            }
        }
    }
}

TEST_CASE("delta monotonicity") {
    // Holds for stores with non-empty domains; an emptied domain switches
    // delta off entirely (rejection takes over from there).
    std::mt19937 rng(8102);
    int done = 0;
    while (done < 300) {
        ConstraintDef c = random_constraint(rng);
        DomainMap d;
        d[v1] = oracle::random_domain(rng, 10, false);
        d[v2] = oracle::random_domain(rng, 10, false);
        DomainMap d2;
        d2[v1] = d[v1].intersect(oracle::random_domain(rng, 10, false));
        d2[v2] = d[v2].intersect(oracle::random_domain(rng, 10, false));
        if (d2[v1].empty() || d2[v2].empty()) continue;
        ++done;
        for (VarId x : {v1, v2}) {
            FiniteDomain w1 = delta(c, x, d).intersect(d2[x]);
            FiniteDomain w2 = delta(c, x, d2);
            CHECK(w1.subset_of(w2));
        }
    }
}

TEST_CASE("unsatisfiable, no_reduction and reducibility trichotomy") {
    // Exactly one of: rejectable, quiescent, or reducible without a wipe.
    // This mirrors the engines' active-constraint dispatch.
    std::mt19937 rng(8103);
    for (int iter = 0; iter < 400; ++iter) {
        ConstraintDef c = random_constraint(rng);
        DomainMap d;
        d[v1] = oracle::random_domain(rng, 10);
        d[v2] = oracle::random_domain(rng, 10);
        bool unsat = unsatisfiable(c, d);
        bool quiet = no_reduction(c, d);
        bool some_delta = !delta(c, v1, d).empty() || !delta(c, v2, d).empty();
        CHECK(!(unsat && quiet));
        CHECK(int(unsat) + int(quiet) + int(!unsat && some_delta) == 1);
        if (!unsat && !quiet) CHECK(some_delta);
    }
}

TEST_CASE("constraint surface text") {
    CHECK(make(ConstraintKind::Gt, v1, v2).text() == "gt([v1,v2])");
    CHECK(make(ConstraintKind::Eq, v2, v1).text() == "eq([v2,v1])");
    CHECK(make(ConstraintKind::NeqOffset, v1, v2, -3).text() ==
          "neq([v1,v2,-3])");
    CHECK(make(ConstraintKind::Element, v1, v2, 0, {2, 5, 7}).text() ==
          "element([v1,[2,5,7],v2])");
}
