#include "fdt/program.hpp"

#include <cctype>
#include <map>
#include <stdexcept>

#include "fdt/error.hpp"

namespace fdt {

const char* to_string(VarOrder v) {
    return v == VarOrder::FirstFailMin ? "firstFailMin"
                                       : "firstFailMiddleFirst";
}

const char* to_string(ValOrder v) {
    return v == ValOrder::MinValue ? "minValue" : "middleValue";
}

std::optional<VarOrder> var_order_from_string(std::string_view s) {
    if (s == "firstFailMin") return VarOrder::FirstFailMin;
    if (s == "firstFailMiddleFirst") return VarOrder::FirstFailMiddleFirst;
    return std::nullopt;
}

std::optional<ValOrder> val_order_from_string(std::string_view s) {
    if (s == "minValue") return ValOrder::MinValue;
    if (s == "middleValue") return ValOrder::MiddleValue;
    return std::nullopt;
}

namespace {

struct Token {
    enum Type { Ident, Int, Punct, End } type = End;
    std::string text;
    long value = 0;
    std::size_t line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, tok_.line, tok_.col);
    }

private:
    void advance() {
        skip_space();
        tok_ = Token{};
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) {
            tok_.type = Token::End;
            tok_.text = "<end of input>";
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_'))
                step();
            tok_.type = Token::Ident;
            tok_.text = std::string(src_.substr(start, pos_ - start));
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   std::isdigit(static_cast<unsigned char>(src_[pos_])))
                step();
            tok_.type = Token::Int;
            tok_.text = std::string(src_.substr(start, pos_ - start));
            tok_.value = std::stol(tok_.text);
        } else {
            tok_.type = Token::Punct;
            tok_.text = std::string(1, c);
            step();
        }
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') step();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                step();
            } else {
                break;
            }
        }
    }

    void step() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1, col_ = 1;
    Token tok_;
};

class ProgramParser {
public:
    explicit ProgramParser(std::string_view src) : lex_(src) {}

    Program parse() {
        std::vector<std::string> scope;
        prog_.items = items_until_end(scope);
        return std::move(prog_);
    }

private:
    std::vector<Item> items_until_end(std::vector<std::string>& scope) {
        std::vector<Item> items;
        while (lex_.peek().type != Token::End)
            parse_item(items, scope, /*top_level=*/true);
        return items;
    }

    void parse_item(std::vector<Item>& items, std::vector<std::string>& scope,
                    bool top_level) {
        const Token& t = lex_.peek();
        if (t.type != Token::Ident) lex_.fail("expected item keyword");
        if (t.text == "var") {
            items.push_back(parse_var(scope));
        } else if (t.text == "con") {
            parse_con(items, scope);
        } else if (t.text == "choice") {
            items.push_back(parse_choice(scope));
        } else if (t.text == "label") {
            if (!top_level) lex_.fail("label is only allowed at top level");
            parse_label();
        } else {
            lex_.fail("unknown item: " + t.text);
        }
    }

    VarDeclItem parse_var(std::vector<std::string>& scope) {
        lex_.take();  // var
        Token name = expect_ident("variable name");
        if (name.text[0] == '_')
            lex_.fail("variable names starting with '_' are reserved");
        if (lookup(scope, name.text))
            fail_at(name, "duplicate variable name: " + name.text);
        expect_keyword("in");
        FiniteDomain dom = parse_domain_tokens();
        expect_punct(";");
        return declare(scope, name.text, dom, false);
    }

    VarDeclItem declare(std::vector<std::string>& scope,
                        const std::string& name, const FiniteDomain& dom,
                        bool hidden) {
        VarDeclItem item;
        item.slot = prog_.slot_count++;
        item.name = name;
        item.domain = dom;
        item.hidden = hidden;
        scope.push_back(name);
        slot_by_name_[name] = item.slot;
        prog_.var_decls.emplace_back(name, dom);
        return item;
    }

    void parse_con(std::vector<Item>& items, std::vector<std::string>& scope) {
        lex_.take();  // con
        Token name = expect_ident("constraint name");
        expect_punct(":");
        Token kind = expect_ident("constraint kind");
        expect_punct("(");
        PostItem post;
        post.name = name.text;
        if (kind.text == "gt" || kind.text == "eq") {
            post.kind = kind.text == "gt" ? ConstraintKind::Gt
                                          : ConstraintKind::Eq;
            post.var_slots.push_back(var_ref(scope));
            expect_punct(",");
            post.var_slots.push_back(var_ref(scope));
        } else if (kind.text == "neq") {
            post.kind = ConstraintKind::NeqOffset;
            post.var_slots.push_back(var_ref(scope));
            expect_punct(",");
            post.var_slots.push_back(var_ref(scope));
            expect_punct(",");
            post.offset = signed_int();
        } else if (kind.text == "element") {
            post.kind = ConstraintKind::Element;
            post.var_slots.push_back(var_ref(scope));
            expect_punct(",");
            expect_punct("[");
            for (;;) {
                post.table.push_back(signed_int());
                if (lex_.peek().text != ",") break;
                lex_.take();
            }
            expect_punct("]");
            expect_punct(",");
            post.var_slots.push_back(var_ref(scope));
            if (post.table.empty())
                fail_at(kind, "element needs a non-empty list");
        } else if (kind.text == "eq_const") {
            // Desugars to a hidden singleton variable plus eq, declared
            // right before the post so it is traced at the post site.
            int x = var_ref(scope);
            expect_punct(",");
            int k = signed_int();
            expect_punct(")");
            expect_punct(";");
            std::string hidden_name =
                "_" + name.text + "_k" + std::to_string(hidden_count_++);
            items.push_back(
                declare(scope, hidden_name, FiniteDomain::singleton(k), true));
            PostItem eq;
            eq.name = name.text;
            eq.kind = ConstraintKind::Eq;
            eq.var_slots = {x, slot_by_name_.at(hidden_name)};
            items.push_back(eq);
            return;
        } else {
            fail_at(kind, "unknown constraint kind: " + kind.text);
        }
        expect_punct(")");
        expect_punct(";");
        items.push_back(post);
    }

    ChoiceItem parse_choice(std::vector<std::string>& scope) {
        lex_.take();  // choice
        ChoiceItem choice;
        choice.first = parse_block(scope);
        expect_keyword("or");
        choice.second = parse_block(scope);
        expect_punct(";");
        return choice;
    }

    std::vector<Item> parse_block(std::vector<std::string>& scope) {
        expect_punct("{");
        std::vector<Item> items;
        // Names declared inside an alternative go out of scope with it.
        std::size_t mark = scope.size();
        while (lex_.peek().text != "}" && lex_.peek().type != Token::End)
            parse_item(items, scope, /*top_level=*/false);
        expect_punct("}");
        while (scope.size() > mark) {
            slot_by_name_.erase(scope.back());
            scope.pop_back();
        }
        return items;
    }

    void parse_label() {
        Token label = lex_.take();
        expect_keyword("all");
        Token vo = expect_ident("variable order");
        Token va = expect_ident("value order");
        expect_punct(";");
        auto var_order = var_order_from_string(vo.text);
        if (!var_order) fail_at(vo, "unknown variable order: " + vo.text);
        auto val_order = val_order_from_string(va.text);
        if (!val_order) fail_at(va, "unknown value order: " + va.text);
        if (prog_.labeling) fail_at(label, "duplicate label directive");
        prog_.labeling = Strategy{*var_order, *val_order};
    }

    // Domain in a var declaration: bare items (1-3,7) or bracketed.
    FiniteDomain parse_domain_tokens() {
        bool bracketed = lex_.peek().text == "[";
        if (bracketed) lex_.take();
        std::vector<Interval> ivs;
        if (!bracketed || lex_.peek().text != "]") {
            for (;;) {
                int lo = unsigned_int();
                int hi = lo;
                if (lex_.peek().text == "-") {
                    lex_.take();
                    hi = unsigned_int();
                }
                ivs.push_back({lo, hi});
                if (lex_.peek().text != ",") break;
                lex_.take();
            }
        }
        if (bracketed) expect_punct("]");
        return FiniteDomain::from_intervals(std::move(ivs));
    }

    int var_ref(const std::vector<std::string>& scope) {
        Token name = expect_ident("variable name");
        if (!lookup(scope, name.text))
            fail_at(name, "undeclared variable: " + name.text);
        return slot_by_name_.at(name.text);
    }

    static bool lookup(const std::vector<std::string>& scope,
                       const std::string& name) {
        for (const std::string& n : scope)
            if (n == name) return true;
        return false;
    }

    int signed_int() {
        bool neg = false;
        if (lex_.peek().text == "-") {
            lex_.take();
            neg = true;
        }
        int v = unsigned_int();
        return neg ? -v : v;
    }

    int unsigned_int() {
        Token t = lex_.take();
        if (t.type != Token::Int) fail_at(t, "expected integer");
        if (t.value > kFullMax) fail_at(t, "value exceeds domain maximum");
        return static_cast<int>(t.value);
    }

    Token expect_ident(const char* what) {
        Token t = lex_.take();
        if (t.type != Token::Ident)
            fail_at(t, std::string("expected ") + what);
        return t;
    }

    void expect_keyword(const std::string& kw) {
        Token t = lex_.take();
        if (t.type != Token::Ident || t.text != kw)
            fail_at(t, "expected '" + kw + "'");
    }

    void expect_punct(const std::string& p) {
        Token t = lex_.take();
        if (t.type != Token::Punct || t.text != p)
            fail_at(t, "expected '" + p + "', got '" + t.text + "'");
    }

    [[noreturn]] void fail_at(const Token& t, const std::string& msg) {
        throw ParseError(msg, t.line, t.col);
    }

    Lexer lex_;
    Program prog_;
    std::map<std::string, int> slot_by_name_;
    int hidden_count_ = 0;
};

}  // namespace

Program parse_program(std::string_view text) {
    return ProgramParser(text).parse();
}

std::string queens_program(int n, const Strategy& s) {
    if (n < 1) throw std::invalid_argument("queens: n must be >= 1");
    std::string out = "# " + std::to_string(n) + "-queens\n";
    for (int i = 1; i <= n; ++i)
        out += "var q" + std::to_string(i) + " in 1-" + std::to_string(n) +
               ";\n";
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            auto post = [&](const char* tag, int k) {
                out += "con " + std::string(tag) + std::to_string(i) + "_" +
                       std::to_string(j) + ": neq(q" + std::to_string(i) +
                       ",q" + std::to_string(j) + "," + std::to_string(k) +
                       ");\n";
            };
            post("row", 0);
            post("dup", j - i);   // q_i != q_j + (j-i)
            post("ddn", i - j);   // q_i != q_j + (i-j)
        }
    }
    out += "label all " + std::string(to_string(s.var_order)) + " " +
           to_string(s.val_order) + ";\n";
    return out;
}

}  // namespace fdt
