#include "fdt/viz.hpp"

#include <set>

#include "corpus.hpp"
#include "doctest.h"
#include "fdt/validate.hpp"

using namespace fdt;

namespace {

ParsedTrace element_choice_trace() {
    Program p = parse_program(corpus::kElementChoice);
    return corpus::as_trace(corpus::run_ref(p));
}

std::vector<SceneRow> rows_at(const std::vector<SceneRow>& rows, int step) {
    std::vector<SceneRow> out;
    for (const SceneRow& r : rows)
        if (r.step == step) out.push_back(r);
    return out;
}

}  // namespace

TEST_CASE("samples fire at constraint posts, rejects and solutions") {
    ParsedTrace t = element_choice_trace();
    auto rows = sample(t);
    int posts = 0, rejects = 0, solutions = 0;
    for (const TraceEvent& e : t.events) {
        posts += e.port == Port::NewConstraint;
        rejects += e.port == Port::Reject;
        solutions += e.port == Port::Solution;
    }
    int steps = 0;
    for (const SceneRow& r : rows) steps = std::max(steps, r.step);
    CHECK(steps == posts + rejects + solutions);
}

TEST_CASE("the second sample sees both domains at size 3 with kind min") {
    // Replaying the element/choice trace to the second constraint post:
    // v1 was reduced by [min,max] (priority picks min), v2 likewise.
    auto rows = sample(element_choice_trace());
    auto second = rows_at(rows, 2);
    REQUIRE(second.size() == 2);
    CHECK(second[0].var == 1);
    CHECK(second[0].size == 3);
    CHECK(second[0].kind == SceneKind::Min);
    CHECK(second[1].var == 2);
    CHECK(second[1].size == 3);
    CHECK(second[1].kind == SceneKind::Min);
}

TEST_CASE("kind is none for variables untouched between samples") {
    ParsedTrace t;
    t.events = parse_trace(
                   "chrono=1 port=newVariable vid=v1 dom=[1-3]\n"
                   "chrono=2 port=newConstraint cid=c1 ctext=eq([v1,v1])\n"
                   "chrono=3 port=suspend cid=c1\n"
                   "chrono=4 port=newConstraint cid=c2 ctext=eq([v1,v1])\n")
                   .events;
    auto rows = sample(t);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].kind == SceneKind::None);
    CHECK(rows[1].kind == SceneKind::None);
}

TEST_CASE("sizes equal replayed cardinalities at every sample") {
    Program p = parse_program(queens_program(6, Strategy{}));
    ParsedTrace t = corpus::as_trace(
        corpus::run_fast(p, corpus::effective_strategy(p)));
    auto rows = sample(t);

    // Independent replay: recompute sizes at each sampling event.
    DomainReplayer replay;
    int step = 0;
    std::size_t cursor = 0;
    for (const TraceEvent& e : t.events) {
        replay.apply(e);
        if (e.port == Port::NewConstraint || e.port == Port::Reject ||
            e.port == Port::Solution) {
            ++step;
            for (const auto& [v, d] : replay.domains()) {
                REQUIRE(cursor < rows.size());
                CHECK(rows[cursor].step == step);
                CHECK(rows[cursor].var == v.ordinal);
                CHECK(rows[cursor].size == d.size());
                ++cursor;
            }
        }
    }
    CHECK(cursor == rows.size());
}

TEST_CASE("suspend and awake carry no scene information") {
    ParsedTrace full = element_choice_trace();
    ParsedTrace filtered;
    for (const TraceEvent& e : full.events)
        if (e.port != Port::Suspend && e.port != Port::Awake)
            filtered.events.push_back(e);
    CHECK(sample(full) == sample(filtered));
}

TEST_CASE("csv export is sorted and draws kinds from the fixed set") {
    auto rows = sample(element_choice_trace());
    std::string csv = scene_csv(rows);
    CHECK(csv.substr(0, 19) == "step,var,size,kind\n");
    std::set<std::string> allowed = {"none", "min", "max",
                                     "ground", "any", "empty"};
    std::size_t lines = 0;
    std::size_t pos = 19;
    int prev_step = 0, prev_var = 0;
    while (pos < csv.size()) {
        std::size_t nl = csv.find('\n', pos);
        std::string line = csv.substr(pos, nl - pos);
        pos = nl + 1;
        ++lines;
        auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
        auto c3 = line.rfind(',');
        int step = std::stoi(line.substr(0, c1));
        int var = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
        CHECK(std::pair(prev_step, prev_var) < std::pair(step, var));
        prev_step = step;
        prev_var = var;
        CHECK(allowed.count(line.substr(c3 + 1)));
    }
    CHECK(lines == rows.size());
}

TEST_CASE("two rows give two csv lines") {
    std::vector<SceneRow> rows = {{1, 1, 3, SceneKind::Min},
                                  {1, 2, 7, SceneKind::None}};
    CHECK(scene_csv(rows) == "step,var,size,kind\n1,1,3,min\n1,2,7,none\n");
}

TEST_CASE("3d scene lists one box per row") {
    std::vector<SceneRow> rows = {{1, 1, 3, SceneKind::Ground}};
    std::string scene = scene_3d(rows);
    CHECK(scene.find("box 1 1 3 ground\n") != std::string::npos);
}
