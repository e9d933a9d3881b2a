#include "fdt/state.hpp"

namespace fdt {

std::optional<std::string> state_invariant_error(const SolverState& s) {
    auto known = [&](ConstraintId c) { return s.constraints.count(c) != 0; };

    if (s.active && s.rejected)
        return "active and rejected are simultaneously non-empty";
    if (s.active && s.sleeping.count(*s.active))
        return "constraint " + to_string(*s.active) +
               " is both active and sleeping";
    if (s.rejected && s.sleeping.count(*s.rejected))
        return "constraint " + to_string(*s.rejected) +
               " is both rejected and sleeping";

    if (s.active && !known(*s.active))
        return "active constraint " + to_string(*s.active) + " not in C";
    if (s.rejected && !known(*s.rejected))
        return "rejected constraint " + to_string(*s.rejected) + " not in C";
    for (ConstraintId c : s.sleeping)
        if (!known(c))
            return "sleeping constraint " + to_string(c) + " not in C";
    for (ConstraintId c : s.pending_wake)
        if (!known(c))
            return "queued constraint " + to_string(c) + " not in C";

    for (const auto& [id, def] : s.constraints)
        for (VarId v : def.vars)
            if (!s.var_known(v))
                return "constraint " + to_string(id) +
                       " references unknown variable " + to_string(v);
    return std::nullopt;
}

}  // namespace fdt
