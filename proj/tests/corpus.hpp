// Shared test corpus: the two worked examples from the reference traces,
// queens instances, and a deterministic random-program generator.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "fdt/fast_engine.hpp"
#include "fdt/program.hpp"
#include "fdt/ref_engine.hpp"
#include "fdt/trace.hpp"

namespace corpus {

// Fig.-1-style system: x > y, y > z over {1,2,3}.
inline const char* kGtChain =
    "var x in 1-3;\n"
    "var y in 1-3;\n"
    "var z in 1-3;\n"
    "con c1: gt(x,y);\n"
    "con c2: gt(y,z);\n";

// The element/choice program behind the reference trace:
// element over [2,5,7], then (a = i ; a = 2).
inline const char* kElementChoice =
    "var i in 0-268435455;\n"
    "var a in 0-268435455;\n"
    "con c1: element(i,[2,5,7],a);\n"
    "choice { con c2: eq(a,i); } or { con c3: eq_const(a,2); };\n";

struct RunResult {
    fdt::EngineResult result;
    std::vector<fdt::TraceEvent> events;
};

inline RunResult run_ref(const fdt::Program& p,
                         fdt::Strategy s = {}) {
    RunResult out;
    fdt::VectorSink sink(out.events);
    fdt::Emitter em(fdt::EmissionConfig::everything(), &sink);
    out.result = fdt::solve_ref(p, s, em);
    return out;
}

inline RunResult run_fast(const fdt::Program& p,
                          fdt::Strategy s = {}) {
    RunResult out;
    fdt::VectorSink sink(out.events);
    fdt::Emitter em(fdt::EmissionConfig::everything(), &sink);
    out.result = fdt::solve_fast(p, s, em);
    return out;
}

inline fdt::ParsedTrace as_trace(const RunResult& r) {
    fdt::ParsedTrace t;
    t.events = r.events;
    return t;
}

inline fdt::Strategy effective_strategy(const fdt::Program& p) {
    return p.labeling.value_or(fdt::Strategy{});
}

// Random solvable-or-not programs: 3-8 variables with domains inside
// 0..15, 2-10 constraints, occasionally a choice construct.
inline std::string random_program(std::mt19937& rng) {
    std::uniform_int_distribution<int> var_count(3, 8);
    std::uniform_int_distribution<int> con_count(2, 10);
    std::uniform_int_distribution<int> bound(0, 15);
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_int_distribution<int> offset(-4, 4);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> table_len(1, 5);

    int nvars = var_count(rng);
    std::string out;
    for (int i = 1; i <= nvars; ++i) {
        int a = bound(rng), b = bound(rng);
        if (a > b) std::swap(a, b);
        out += "var x" + std::to_string(i) + " in " + std::to_string(a) + "-" +
               std::to_string(b) + ";\n";
    }
    std::uniform_int_distribution<int> var_pick(1, nvars);
    int ncons = con_count(rng);
    bool with_choice = coin(rng) == 0;
    int in_choice = with_choice && ncons >= 4 ? 2 : 0;
    auto one_constraint = [&](int n) {
        std::string x = "x" + std::to_string(var_pick(rng));
        std::string y = "x" + std::to_string(var_pick(rng));
        std::string name = "k" + std::to_string(n);
        switch (kind(rng)) {
            case 0: return "con " + name + ": gt(" + x + "," + y + ");\n";
            case 1: return "con " + name + ": eq(" + x + "," + y + ");\n";
            case 2:
                return "con " + name + ": neq(" + x + "," + y + "," +
                       std::to_string(offset(rng)) + ");\n";
            default: {
                std::string list;
                int len = table_len(rng);
                for (int i = 0; i < len; ++i) {
                    if (i) list += ",";
                    list += std::to_string(bound(rng));
                }
                return "con " + name + ": element(" + x + ",[" + list + "]," +
                       y + ");\n";
            }
        }
    };
    int plain = ncons - in_choice * 2;
    for (int i = 0; i < plain; ++i) out += one_constraint(i);
    if (in_choice) {
        out += "choice { " + one_constraint(100) + one_constraint(101) +
               " } or { " + one_constraint(200) + one_constraint(201) +
               " };\n";
    }
    if (coin(rng) == 0) {
        out += std::string("label all ") +
               (coin(rng) ? "firstFailMin" : "firstFailMiddleFirst") + " " +
               (coin(rng) ? "minValue" : "middleValue") + ";\n";
    }
    return out;
}

// The full corpus used by the replay and differential criteria.
inline std::vector<std::string> standard_corpus() {
    std::vector<std::string> out;
    out.push_back(kGtChain);
    out.push_back(kElementChoice);
    for (int n : {4, 5, 6, 8})
        out.push_back(fdt::queens_program(n, fdt::Strategy{}));
    std::mt19937 rng(20030921);
    for (int i = 0; i < 22; ++i) out.push_back(random_program(rng));
    return out;
}

}  // namespace corpus
