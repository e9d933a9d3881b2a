#include "fdt/fast_engine.hpp"

#include "corpus.hpp"
#include "doctest.h"
#include "fdt/error.hpp"
#include "oracles.hpp"

using namespace fdt;

TEST_CASE("fast engine solves the element/choice program") {
    Program p = parse_program(corpus::kElementChoice);
    auto run = corpus::run_fast(p);
    REQUIRE(run.result.outcome == EngineResult::Outcome::Solution);
    CHECK(run.result.bindings == Bindings{{VarId{1}, 1}, {VarId{2}, 2}});
    CHECK(run.events.back().port == Port::Solution);
}

TEST_CASE("declared domains arrive via full-domain creation plus reduce") {
    Program p = parse_program("var x in 1-3;");
    auto run = corpus::run_fast(p);
    REQUIRE(run.events.size() >= 2);
    CHECK(run.events[0].port == Port::NewVariable);
    CHECK(*run.events[0].dom == FiniteDomain::full());
    CHECK(run.events[1].port == Port::Reduce);
    CHECK(*run.events[1].cid == kLabelCid);
    CHECK(*run.events[1].dom == FiniteDomain::range(1, 3));
    // A two-sided bounds trim is one unified reduce, not two.
    CHECK(run.events[2].port != Port::Reduce);
}

TEST_CASE("empty program yields a vacuous solution with no events") {
    Program p = parse_program("");
    auto run = corpus::run_fast(p);
    CHECK(run.result.outcome == EngineResult::Outcome::Solution);
    CHECK(run.result.bindings.empty());
    CHECK(run.events.empty());
    CHECK(run.result.event_count == 0);
}

TEST_CASE("no reduce ever has an empty withdrawal or duplicate chrono") {
    for (const std::string& text : corpus::standard_corpus()) {
        Program p = parse_program(text);
        auto run = corpus::run_fast(p, corpus::effective_strategy(p));
        std::uint64_t prev = 0;
        for (const TraceEvent& e : run.events) {
            CHECK(e.chrono == prev + 1);
            prev = e.chrono;
            if (e.port == Port::Reduce) {
                CHECK(!e.wd->empty());
                CHECK(e.dom->intersect(*e.wd).empty());
            }
        }
    }
}

TEST_CASE("registry keeps a bijection after every event") {
    Program p = parse_program(corpus::kElementChoice);
    std::vector<TraceEvent> events;
    VectorSink sink(events);
    Emitter em(EmissionConfig::everything(), &sink);
    FastEngine engine(p, Strategy{}, em);
    int audits = 0;
    engine.set_event_audit([&] {
        ++audits;
        CHECK(engine.registry().bijection_ok());
        auto vars = engine.registry().variables();
        CHECK(std::is_sorted(vars.begin(), vars.end()));
        auto cons = engine.registry().constraints();
        CHECK(std::is_sorted(cons.begin(), cons.end()));
    });
    auto result = engine.run();
    CHECK(result.outcome == EngineResult::Outcome::Solution);
    CHECK(audits == static_cast<int>(result.event_count));
}

TEST_CASE("registry lookups are mutually inverse and enumerate live ids") {
    Program p = parse_program(corpus::kElementChoice);
    std::vector<TraceEvent> events;
    VectorSink sink(events);
    Emitter em(EmissionConfig::everything(), &sink);
    FastEngine engine(p, Strategy{}, em);

    bool checked_after_post = false;
    bool checked_after_backtrack = false;
    engine.set_event_audit([&] {
        if (events.empty()) return;
        const TraceEvent& last = events.back();
        const Registry& reg = engine.registry();
        if (last.port == Port::NewConstraint &&
            last.cid == ConstraintId{1}) {
            // After the element post: v1, v2 live.
            CHECK(reg.variables() == std::vector<VarId>{VarId{1}, VarId{2}});
            CHECK(reg.constraints() ==
                  std::vector<ConstraintId>{ConstraintId{1}});
            const void* h = reg.handle_of(VarId{1});
            CHECK(reg.variable_id(h) == VarId{1});
            checked_after_post = true;
        }
        if (last.port == Port::BackTo) {
            // c2 was created inside the first alternative and must be
            // gone after backtracking.
            CHECK(reg.constraints() ==
                  std::vector<ConstraintId>{ConstraintId{1}});
            CHECK_THROWS_AS(reg.handle_of(ConstraintId{2}), NotFoundError);
            checked_after_backtrack = true;
        }
    });
    engine.run();
    CHECK(checked_after_post);
    CHECK(checked_after_backtrack);
}

TEST_CASE("queens runs are solved and valid under both strategies") {
    for (auto strategy :
         {Strategy{VarOrder::FirstFailMin, ValOrder::MinValue},
          Strategy{VarOrder::FirstFailMiddleFirst, ValOrder::MiddleValue}}) {
        Program p = parse_program(queens_program(8, strategy));
        auto run = corpus::run_fast(p, strategy);
        REQUIRE(run.result.outcome == EngineResult::Outcome::Solution);
        std::vector<int> placement;
        for (const auto& [v, value] : run.result.bindings)
            placement.push_back(value);
        CHECK(placement.size() == 8);
        CHECK(oracle::queens_ok(placement));
    }
}

TEST_CASE("backTo counts match the independent labeling-tree search") {
    for (int n : {5, 6}) {
        Strategy s;
        Program p = parse_program(queens_program(n, s));
        auto run = corpus::run_fast(p, s);
        REQUIRE(run.result.outcome == EngineResult::Outcome::Solution);
        std::int64_t backs = 0;
        for (const TraceEvent& e : run.events)
            if (e.port == Port::BackTo) ++backs;

        oracle::SetProblem problem;
        for (int i = 1; i <= n; ++i) {
            problem.ordinals.push_back(i);
            for (int v = 1; v <= n; ++v) problem.domains[i].insert(v);
        }
        int cid = 0;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                for (int k : {0, j - i, i - j}) {
                    ConstraintDef c;
                    c.id = ConstraintId{++cid};
                    c.kind = ConstraintKind::NeqOffset;
                    c.vars = {VarId{i}, VarId{j}};
                    c.offset = k;
                    problem.cons.push_back(c);
                }
        auto outcome = oracle::run_set_search(problem, s);
        REQUIRE(outcome.solved);
        CHECK(backs == outcome.failed_nodes);
        // And the engines agree with the oracle's solution tree shape.
        auto ref = corpus::run_ref(p, s);
        std::int64_t ref_backs = 0;
        for (const TraceEvent& e : ref.events)
            if (e.port == Port::BackTo) ++ref_backs;
        CHECK(ref_backs == backs);
    }
}

TEST_CASE("fast engine is deterministic") {
    Program p = parse_program(queens_program(6, Strategy{}));
    auto a = corpus::run_fast(p, corpus::effective_strategy(p));
    auto b = corpus::run_fast(p, corpus::effective_strategy(p));
    CHECK(a.events == b.events);
}

TEST_CASE("unsatisfiable top-level posting fails without choice points") {
    Program p = parse_program(
        "var x in 1-2;\n"
        "var y in 5-6;\n"
        "con c: eq(x,y);\n");
    auto run = corpus::run_fast(p);
    CHECK(run.result.outcome == EngineResult::Outcome::Exhausted);
    REQUIRE(run.events.size() >= 2);
    CHECK(run.events[run.events.size() - 2].port == Port::Reject);
    CHECK(run.events.back().port == Port::Failure);
}
