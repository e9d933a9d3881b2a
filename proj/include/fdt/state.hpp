#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "fdt/constraint.hpp"

namespace fdt {

// The observed state (V, C, D, A, S, R) of the semantics plus the wake
// queue. V is the key set of `domains`. Choice snapshots and the event
// counter live with their owners (engine and emitter).
struct SolverState {
    DomainMap domains;                          // D (keys are V)
    std::map<ConstraintId, ConstraintDef> constraints;  // C
    std::optional<ConstraintId> active;         // A, at most one
    std::set<ConstraintId> sleeping;            // S
    std::optional<ConstraintId> rejected;       // R, at most one
    std::deque<ConstraintId> pending_wake;      // FIFO by first change
    std::map<ConstraintId, ChangeRecord> change_records;

    bool var_known(VarId v) const { return domains.count(v) != 0; }

    const FiniteDomain& domain(VarId v) const { return domains.at(v); }

    bool all_ground() const {
        for (const auto& [v, d] : domains)
            if (!d.is_singleton()) return false;
        return true;
    }
};

// Returns a description of the first violated SolverState invariant, or
// nothing when the state is consistent.
std::optional<std::string> state_invariant_error(const SolverState& s);

}  // namespace fdt
