#pragma once

#include <map>
#include <string>
#include <vector>

#include "fdt/domain.hpp"
#include "fdt/ids.hpp"

namespace fdt {

enum class ConstraintKind { Gt, Eq, NeqOffset, Element };

const char* to_string(ConstraintKind k);

using DomainMap = std::map<VarId, FiniteDomain>;

// One constraint instance. vars is Var(c) in argument order:
//   gt(x,y), eq(x,y), neq(x,y,k)     -> {x, y}
//   element(i,[n1,...],v)            -> {i, v}   (table is 1-based)
struct ConstraintDef {
    ConstraintId id;
    ConstraintKind kind = ConstraintKind::Gt;
    std::vector<VarId> vars;
    int offset = 0;          // neq(x,y,k): x != y + k
    std::vector<int> table;  // element literal list, non-empty

    // Surface text in the trace, e.g. "element([v1,[2,5,7],v2])".
    std::string text() const;

    bool operator==(const ConstraintDef&) const = default;
};

// W^c_x(D): values of x inconsistent with c under the domains in D,
// evaluated on D as given (no folding of other variables' deltas).
// Returns the empty domain when any domain referenced by c's formula is
// empty. pre: x is in Var(c) and all of Var(c) are keys of D.
FiniteDomain delta(const ConstraintDef& c, VarId x, const DomainMap& d);

// True iff some variable of c has an empty domain, or propagating c would
// wipe some variable's domain entirely.
bool unsatisfiable(const ConstraintDef& c, const DomainMap& d);

// True iff c is satisfiable-looking and no delta can remove anything.
bool no_reduction(const ConstraintDef& c, const DomainMap& d);

// Accumulated domain-update kinds per variable since a constraint was
// last suspended.
struct ChangeRecord {
    std::map<VarId, KindSet> changes;

    void note(VarId v, KindSet kinds) { changes[v] |= kinds; }
    void clear() { changes.clear(); }
    bool empty() const { return changes.empty(); }
};

// Update kinds a constraint kind reacts to while sleeping.
KindSet subscription(ConstraintKind k);

// True iff some accumulated change on one of c's variables intersects
// c's subscription.
bool wake_condition(const ConstraintDef& c, const ChangeRecord& rec);

// True when a single change with the given kinds would wake kind k;
// used by the queue-based engine at enqueue time.
inline bool wakes(ConstraintKind k, KindSet kinds) {
    return (subscription(k) & kinds) != 0;
}

// Satisfaction of c under a total assignment, for solution checking.
bool satisfied(const ConstraintDef& c, const std::map<VarId, int>& binding);

}  // namespace fdt
