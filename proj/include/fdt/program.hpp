#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fdt/constraint.hpp"
#include "fdt/domain.hpp"

namespace fdt {

enum class VarOrder { FirstFailMin, FirstFailMiddleFirst };
enum class ValOrder { MinValue, MiddleValue };

struct Strategy {
    VarOrder var_order = VarOrder::FirstFailMin;
    ValOrder val_order = ValOrder::MinValue;

    bool operator==(const Strategy&) const = default;
};

const char* to_string(VarOrder v);
const char* to_string(ValOrder v);
std::optional<VarOrder> var_order_from_string(std::string_view s);
std::optional<ValOrder> val_order_from_string(std::string_view s);

// Program items refer to variables by declaration slot; engines map slots
// to runtime ids when the declaring item executes.
struct VarDeclItem {
    int slot = 0;
    std::string name;
    FiniteDomain domain;
    bool hidden = false;  // introduced by desugaring, kept out of bindings
};

struct PostItem {
    std::string name;
    ConstraintKind kind = ConstraintKind::Gt;
    std::vector<int> var_slots;  // argument order
    int offset = 0;
    std::vector<int> table;
};

struct ChoiceItem;

using Item = std::variant<VarDeclItem, PostItem, ChoiceItem>;

struct ChoiceItem {
    std::vector<Item> first;
    std::vector<Item> second;
};

struct Program {
    std::vector<Item> items;
    int slot_count = 0;
    // All declarations in order of appearance, hidden ones included.
    std::vector<std::pair<std::string, FiniteDomain>> var_decls;
    std::optional<Strategy> labeling;
};

// Problem-file grammar:
//   var <name> in <domain>;
//   con <name>: gt(x,y) | eq(x,y) | neq(x,y,k) | element(i,[n,...],v)
//             | eq_const(x,k);
//   choice { <items> } or { <items> };
//   label all <varOrder> <valOrder>;
// Comments run from '#' to end of line. Domains may be written bare
// (1-3,7) or bracketed ([1-3,7]). eq_const(x,k) desugars into a hidden
// singleton variable plus eq.
Program parse_program(std::string_view text);

// n-queens over neq constraints, with the labeling directive for s.
std::string queens_program(int n, const Strategy& s);

}  // namespace fdt
