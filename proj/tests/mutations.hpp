// Mutation catalog for the trace-conformance tests: port swaps, attribute
// drops, and domain perturbations applied to well-formed traces. A
// mutation counts as detected when the mutant fails to parse, fails
// replay_check, or no longer aligns with the original.
#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fdt/trace.hpp"
#include "fdt/validate.hpp"

namespace mutations {

enum class Kind { PortSwap, AttrDrop, DomainPerturb };

inline const char* to_string(Kind k) {
    switch (k) {
        case Kind::PortSwap: return "port-swap";
        case Kind::AttrDrop: return "attr-drop";
        case Kind::DomainPerturb: return "domain-perturb";
    }
    return "?";
}

// Applies one mutation; returns nothing when the chosen event cannot
// carry it (caller retries with a fresh random choice).
inline std::optional<fdt::ParsedTrace> mutate(const fdt::ParsedTrace& trace,
                                              Kind kind, std::mt19937& rng) {
    using namespace fdt;
    if (trace.events.empty()) return std::nullopt;
    ParsedTrace out = trace;
    std::uniform_int_distribution<std::size_t> pick(0,
                                                    out.events.size() - 1);
    TraceEvent& e = out.events[pick(rng)];
    switch (kind) {
        case Kind::PortSwap: {
            std::uniform_int_distribution<int> port_pick(0, kPortCount - 1);
            Port p = e.port;
            for (int tries = 0; tries < 8 && p == e.port; ++tries)
                p = static_cast<Port>(port_pick(rng));
            if (p == e.port) return std::nullopt;
            e.port = p;
            return out;
        }
        case Kind::AttrDrop: {
            std::vector<int> present;
            if (e.cid) present.push_back(0);
            if (e.vid) present.push_back(1);
            if (e.dom) present.push_back(2);
            if (e.wd) present.push_back(3);
            if (e.mods) present.push_back(4);
            if (e.ctext) present.push_back(5);
            if (e.bindings) present.push_back(6);
            if (e.cpid) present.push_back(7);
            if (present.empty()) return std::nullopt;
            std::uniform_int_distribution<std::size_t> which(
                0, present.size() - 1);
            switch (present[which(rng)]) {
                case 0: e.cid.reset(); break;
                case 1: e.vid.reset(); break;
                case 2: e.dom.reset(); break;
                case 3: e.wd.reset(); break;
                case 4: e.mods.reset(); break;
                case 5: e.ctext.reset(); break;
                case 6: e.bindings.reset(); break;
                case 7: e.cpid.reset(); break;
            }
            return out;
        }
        case Kind::DomainPerturb: {
            // Move one value between dom and wd of a reduce, or clip a
            // newVariable domain.
            std::vector<std::size_t> reduces;
            for (std::size_t i = 0; i < out.events.size(); ++i)
                if (out.events[i].port == Port::Reduce &&
                    out.events[i].dom && out.events[i].wd)
                    reduces.push_back(i);
            if (reduces.empty()) return std::nullopt;
            std::uniform_int_distribution<std::size_t> which(
                0, reduces.size() - 1);
            TraceEvent& r = out.events[reduces[which(rng)]];
            if (std::uniform_int_distribution<int>(0, 1)(rng) == 0 &&
                r.dom->size() > 1) {
                int moved = r.dom->min();
                r.dom = r.dom->minus(FiniteDomain::singleton(moved));
                r.wd = r.wd->unite(FiniteDomain::singleton(moved));
            } else {
                int moved = r.wd->min();
                r.wd = r.wd->minus(FiniteDomain::singleton(moved));
                r.dom = r.dom->unite(FiniteDomain::singleton(moved));
            }
            return out;
        }
    }
    return std::nullopt;
}

struct DetectionStats {
    int applied = 0;
    int detected = 0;
};

inline bool detected(const fdt::ParsedTrace& original,
                     const fdt::ParsedTrace& mutant) {
    if (!fdt::replay_check(mutant).empty()) return true;
    // Survived replay: require divergence against the original.
    fdt::AlignmentReport report = fdt::align(original, mutant);
    return !report.equivalent;
}

}  // namespace mutations
