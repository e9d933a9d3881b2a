#include "fdt/constraint.hpp"

#include <stdexcept>

namespace fdt {

const char* to_string(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::Gt: return "gt";
        case ConstraintKind::Eq: return "eq";
        case ConstraintKind::NeqOffset: return "neq";
        case ConstraintKind::Element: return "element";
    }
    return "?";
}

std::string ConstraintDef::text() const {
    std::string out = to_string(kind);
    out += "([";
    switch (kind) {
        case ConstraintKind::Gt:
        case ConstraintKind::Eq:
            out += to_string(vars[0]) + "," + to_string(vars[1]);
            break;
        case ConstraintKind::NeqOffset:
            out += to_string(vars[0]) + "," + to_string(vars[1]) + "," +
                   std::to_string(offset);
            break;
        case ConstraintKind::Element: {
            out += to_string(vars[0]) + ",[";
            for (std::size_t i = 0; i < table.size(); ++i) {
                if (i) out += ',';
                out += std::to_string(table[i]);
            }
            out += "]," + to_string(vars[1]);
            break;
        }
    }
    out += "])";
    return out;
}

namespace {

const FiniteDomain& dom_of(const DomainMap& d, VarId x) {
    auto it = d.find(x);
    if (it == d.end())
        throw std::logic_error("delta: variable " + to_string(x) +
                               " missing from domain map");
    return it->second;
}

// Table values admissible for element's value variable given the index
// domain, and table indices admissible given the value domain.
FiniteDomain element_supported_values(const std::vector<int>& table,
                                      const FiniteDomain& idx) {
    std::vector<int> vals;
    for (std::size_t j = 0; j < table.size(); ++j)
        if (idx.contains(static_cast<int>(j) + 1)) vals.push_back(table[j]);
    return FiniteDomain::from_values(std::move(vals));
}

FiniteDomain element_supported_indices(const std::vector<int>& table,
                                       const FiniteDomain& val) {
    std::vector<int> idxs;
    for (std::size_t j = 0; j < table.size(); ++j)
        if (val.contains(table[j])) idxs.push_back(static_cast<int>(j) + 1);
    return FiniteDomain::from_values(std::move(idxs));
}

}  // namespace

FiniteDomain delta(const ConstraintDef& c, VarId x, const DomainMap& d) {
    const FiniteDomain& dx = dom_of(d, x);
    for (VarId v : c.vars)
        if (dom_of(d, v).empty()) return {};

    switch (c.kind) {
        case ConstraintKind::Gt: {
            const FiniteDomain& dl = dom_of(d, c.vars[0]);
            const FiniteDomain& dr = dom_of(d, c.vars[1]);
            if (x == c.vars[0])  // values that cannot exceed any right value
                return dx.intersect(FiniteDomain::range(0, dr.min()));
            return dx.intersect(FiniteDomain::range(dl.max(), kFullMax));
        }
        case ConstraintKind::Eq: {
            const FiniteDomain& other =
                dom_of(d, x == c.vars[0] ? c.vars[1] : c.vars[0]);
            return dx.minus(other);
        }
        case ConstraintKind::NeqOffset: {
            // x != y + k; a ground side forbids exactly one value opposite.
            const FiniteDomain& other =
                dom_of(d, x == c.vars[0] ? c.vars[1] : c.vars[0]);
            if (!other.is_singleton()) return {};
            int forbidden = x == c.vars[0] ? other.min() + c.offset
                                           : other.min() - c.offset;
            if (!dx.contains(forbidden)) return {};
            return FiniteDomain::singleton(forbidden);
        }
        case ConstraintKind::Element: {
            const FiniteDomain& di = dom_of(d, c.vars[0]);
            const FiniteDomain& dv = dom_of(d, c.vars[1]);
            if (x == c.vars[0])
                return dx.minus(element_supported_indices(c.table, dv));
            return dx.minus(element_supported_values(c.table, di));
        }
    }
    throw std::logic_error("delta: unknown constraint kind");
}

bool unsatisfiable(const ConstraintDef& c, const DomainMap& d) {
    for (VarId x : c.vars)
        if (dom_of(d, x).empty()) return true;
    for (VarId x : c.vars) {
        const FiniteDomain& dx = dom_of(d, x);
        if (!dx.empty() && delta(c, x, d) == dx) return true;
    }
    return false;
}

bool no_reduction(const ConstraintDef& c, const DomainMap& d) {
    if (unsatisfiable(c, d)) return false;
    for (VarId x : c.vars)
        if (!delta(c, x, d).empty()) return false;
    return true;
}

KindSet subscription(ConstraintKind k) {
    constexpr KindSet kMin = kind_bit(UpdateKind::Min);
    constexpr KindSet kMax = kind_bit(UpdateKind::Max);
    constexpr KindSet kGround = kind_bit(UpdateKind::Ground);
    constexpr KindSet kAny = kind_bit(UpdateKind::Any);
    constexpr KindSet kEmpty = kind_bit(UpdateKind::Empty);
    switch (k) {
        case ConstraintKind::Gt: return kMin | kMax | kGround | kEmpty;
        case ConstraintKind::Eq:
        case ConstraintKind::Element:
            return kMin | kMax | kGround | kAny | kEmpty;
        case ConstraintKind::NeqOffset: return kGround | kEmpty;
    }
    return 0;
}

bool wake_condition(const ConstraintDef& c, const ChangeRecord& rec) {
    KindSet sub = subscription(c.kind);
    for (VarId v : c.vars) {
        auto it = rec.changes.find(v);
        if (it != rec.changes.end() && (it->second & sub)) return true;
    }
    return false;
}

bool satisfied(const ConstraintDef& c, const std::map<VarId, int>& binding) {
    auto val = [&](VarId v) {
        auto it = binding.find(v);
        if (it == binding.end())
            throw std::logic_error("satisfied: unbound variable " +
                                   to_string(v));
        return it->second;
    };
    switch (c.kind) {
        case ConstraintKind::Gt: return val(c.vars[0]) > val(c.vars[1]);
        case ConstraintKind::Eq: return val(c.vars[0]) == val(c.vars[1]);
        case ConstraintKind::NeqOffset:
            return val(c.vars[0]) != val(c.vars[1]) + c.offset;
        case ConstraintKind::Element: {
            int i = val(c.vars[0]);
            return i >= 1 && i <= static_cast<int>(c.table.size()) &&
                   c.table[static_cast<std::size_t>(i) - 1] == val(c.vars[1]);
        }
    }
    return false;
}

}  // namespace fdt
