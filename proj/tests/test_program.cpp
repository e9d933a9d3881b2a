#include "fdt/program.hpp"

#include "doctest.h"
#include "fdt/error.hpp"

using namespace fdt;

TEST_CASE("parses variables, constraints, choice and labeling") {
    Program p = parse_program(
        "# comment\n"
        "var i in 0-268435455;\n"
        "var a in 0-268435455;\n"
        "con c1: element(i,[2,5,7],a);\n"
        "choice { con c2: eq(a,i); } or { con c3: eq_const(a,2); };\n"
        "label all firstFailMin minValue;\n");
    // Two declared vars plus the hidden one from eq_const.
    CHECK(p.slot_count == 3);
    CHECK(p.var_decls.size() == 3);
    CHECK(p.var_decls[0].first == "i");
    CHECK(p.var_decls[2].second == FiniteDomain::singleton(2));
    REQUIRE(p.items.size() == 4);
    CHECK(std::holds_alternative<VarDeclItem>(p.items[0]));
    CHECK(std::holds_alternative<PostItem>(p.items[2]));
    const auto& choice = std::get<ChoiceItem>(p.items[3]);
    CHECK(choice.first.size() == 1);
    // eq_const desugars to hidden var + eq at the post site.
    REQUIRE(choice.second.size() == 2);
    const auto& hidden = std::get<VarDeclItem>(choice.second[0]);
    CHECK(hidden.hidden);
    CHECK(hidden.domain == FiniteDomain::singleton(2));
    const auto& eq = std::get<PostItem>(choice.second[1]);
    CHECK(eq.kind == ConstraintKind::Eq);
    REQUIRE(p.labeling);
    CHECK(p.labeling->var_order == VarOrder::FirstFailMin);
    CHECK(p.labeling->val_order == ValOrder::MinValue);
}

TEST_CASE("single variable program") {
    Program p = parse_program("var x in 1-3;");
    CHECK(p.slot_count == 1);
    CHECK(p.items.size() == 1);
    CHECK(!p.labeling);
}

TEST_CASE("domains accept bare and bracketed forms") {
    Program a = parse_program("var x in 1-3,7;");
    Program b = parse_program("var x in [1-3,7];");
    CHECK(std::get<VarDeclItem>(a.items[0]).domain ==
          std::get<VarDeclItem>(b.items[0]).domain);
}

TEST_CASE("semantic errors name the offender") {
    try {
        parse_program("con c: gt(x,y);");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("x") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_program("var x in 1-2; var x in 1-2;"), ParseError);
    CHECK_THROWS_AS(parse_program("var x in 1-2; con c: nosuch(x,x);"),
                    ParseError);
    CHECK_THROWS_AS(parse_program("var x in 1-2; con c: element(x,[],x);"),
                    ParseError);
    CHECK_THROWS_AS(parse_program("var x in 1-2"), ParseError);  // missing ;
    CHECK_THROWS_AS(
        parse_program("var x in 1-2; label all bogus minValue;"),
        ParseError);
}

TEST_CASE("names declared inside a choice alternative are scoped") {
    const char* text =
        "var x in 1-3;\n"
        "choice { var y in 1-2; con a: gt(x,y); } or { con b: eq(x,x); };\n";
    CHECK_NOTHROW(parse_program(text));
    const char* bad =
        "var x in 1-3;\n"
        "choice { var y in 1-2; } or { con b: eq(x,y); };\n";
    CHECK_THROWS_AS(parse_program(bad), ParseError);
    const char* after =
        "var x in 1-3;\n"
        "choice { var y in 1-2; } or { };\n"
        "con c: eq(x,y);\n";
    CHECK_THROWS_AS(parse_program(after), ParseError);
}

TEST_CASE("parse errors carry line and column") {
    try {
        parse_program("var x in 1-3;\ncon ! bad\n");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("queens generator emits parseable programs") {
    for (int n : {1, 3, 8}) {
        std::string text = queens_program(n, Strategy{});
        Program p = parse_program(text);
        CHECK(p.slot_count == n);
        // n vars + 3*C(n,2) constraints.
        int expected = n + 3 * n * (n - 1) / 2;
        CHECK(static_cast<int>(p.items.size()) == expected);
        REQUIRE(p.labeling);
    }
    Strategy middle{VarOrder::FirstFailMiddleFirst, ValOrder::MiddleValue};
    Program p = parse_program(queens_program(4, middle));
    CHECK(p.labeling->var_order == VarOrder::FirstFailMiddleFirst);
    CHECK(p.labeling->val_order == ValOrder::MiddleValue);
    CHECK_THROWS_AS(queens_program(0, Strategy{}), std::invalid_argument);
}

TEST_CASE("queens constraints pin both diagonals and rows") {
    Program p = parse_program(queens_program(3, Strategy{}));
    int neq = 0;
    for (const Item& item : p.items)
        if (const auto* post = std::get_if<PostItem>(&item)) {
            CHECK(post->kind == ConstraintKind::NeqOffset);
            ++neq;
        }
    CHECK(neq == 9);
}
