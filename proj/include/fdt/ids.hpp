#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace fdt {

// Ordinals are handed out densely in creation order starting at 1 and are
// never reused within a run, even across backtracking.
struct VarId {
    int ordinal = 0;
    auto operator<=>(const VarId&) const = default;
};

struct ConstraintId {
    int ordinal = 0;
    auto operator<=>(const ConstraintId&) const = default;
};

// Synthetic constraint id attributed to labeling assignments/exclusions and
// engine-side initial-domain trimming; rendered "c0".
inline constexpr ConstraintId kLabelCid{0};

std::string to_string(VarId v);         // "v3"
std::string to_string(ConstraintId c);  // "c3"
std::string cp_name(int cp_ordinal);    // "p3"

// Throw ParseError on malformed input.
VarId parse_var_id(std::string_view s);
ConstraintId parse_constraint_id(std::string_view s);
int parse_cp_name(std::string_view s);

}  // namespace fdt
