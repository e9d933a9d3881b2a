#include "fdt/ids.hpp"

#include <charconv>

#include "fdt/error.hpp"

namespace fdt {

namespace {

int parse_prefixed(std::string_view s, char prefix, const char* what) {
    int n = 0;
    if (s.size() >= 2 && s[0] == prefix) {
        auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), n);
        if (ec == std::errc() && ptr == s.data() + s.size() && n >= 0) return n;
    }
    throw ParseError(std::string("expected ") + what + ", got '" +
                         std::string(s) + "'",
                     1, 1);
}

}  // namespace

std::string to_string(VarId v) { return "v" + std::to_string(v.ordinal); }

std::string to_string(ConstraintId c) {
    return "c" + std::to_string(c.ordinal);
}

std::string cp_name(int cp_ordinal) { return "p" + std::to_string(cp_ordinal); }

VarId parse_var_id(std::string_view s) {
    return VarId{parse_prefixed(s, 'v', "variable id")};
}

ConstraintId parse_constraint_id(std::string_view s) {
    return ConstraintId{parse_prefixed(s, 'c', "constraint id")};
}

int parse_cp_name(std::string_view s) {
    return parse_prefixed(s, 'p', "choice point id");
}

}  // namespace fdt
