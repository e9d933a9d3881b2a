#include "fdt/validate.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "fdt/error.hpp"

namespace fdt {

CtextInfo parse_ctext(std::string_view s) {
    CtextInfo info;
    std::size_t open = s.find('(');
    if (open == std::string_view::npos || s.back() != ')')
        throw ParseError("malformed constraint text", 1, 1);
    info.kind = std::string(s.substr(0, open));
    std::string_view body = s.substr(open + 1, s.size() - open - 2);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        throw ParseError("constraint text needs a bracketed argument list", 1,
                         1);
    body = body.substr(1, body.size() - 2);
    // Arguments are var ids, integers, or a nested integer list.
    std::size_t i = 0;
    while (i < body.size()) {
        char c = body[i];
        if (c == 'v') {
            std::size_t j = i + 1;
            while (j < body.size() &&
                   std::isdigit(static_cast<unsigned char>(body[j])))
                ++j;
            info.vars.push_back(parse_var_id(body.substr(i, j - i)));
            i = j;
        } else if (c == '[') {
            std::size_t close = body.find(']', i);
            if (close == std::string_view::npos)
                throw ParseError("unterminated list in constraint text", 1, 1);
            i = close + 1;
        } else {
            ++i;  // literals and separators
        }
    }
    return info;
}

NameMap parse_name_map(std::string_view text) {
    NameMap out;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line = text.substr(
            start, nl == std::string_view::npos ? nl : nl - start);
        ++lineno;
        start = nl == std::string_view::npos ? text.size() : nl + 1;
        std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(
                                    line.back())))
            line.remove_suffix(1);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected from=to", lineno, 1);
        out[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
    }
    return out;
}

NameMap load_name_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TraceError("cannot open name map: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_name_map(ss.str());
}

std::string rewrite_ctext(std::string_view raw, const NameMap& names,
                          const std::map<int, int>& var_map) {
    std::size_t open = raw.find('(');
    if (open == std::string_view::npos)
        throw ParseError("malformed constraint text", 1, 1);
    std::string kind(raw.substr(0, open));
    auto mapped = names.find(kind);
    std::string out = mapped != names.end() ? mapped->second : kind;
    std::size_t i = open;
    while (i < raw.size()) {
        if (raw[i] == 'v' &&
            i + 1 < raw.size() &&
            std::isdigit(static_cast<unsigned char>(raw[i + 1]))) {
            std::size_t j = i + 1;
            while (j < raw.size() &&
                   std::isdigit(static_cast<unsigned char>(raw[j])))
                ++j;
            int ordinal = std::stoi(std::string(raw.substr(i + 1, j - i - 1)));
            auto it = var_map.find(ordinal);
            out += "v" + std::to_string(it == var_map.end() ? ordinal
                                                            : it->second);
            i = j;
        } else {
            out += raw[i];
            ++i;
        }
    }
    return out;
}

void DomainReplayer::apply(const TraceEvent& e) {
    switch (e.port) {
        case Port::NewVariable:
            if (e.vid && e.dom) domains_[*e.vid] = *e.dom;
            break;
        case Port::Reduce:
            if (e.vid && e.dom) domains_[*e.vid] = *e.dom;
            break;
        case Port::NewConstraint:
            if (e.cid && e.ctext) ctexts_[*e.cid] = *e.ctext;
            break;
        case Port::ChoicePoint:
            if (e.cpid) stack_.push_back({*e.cpid, domains_, ctexts_});
            break;
        case Port::BackTo:
            if (e.cpid) {
                while (!stack_.empty() && stack_.back().cpid != *e.cpid)
                    stack_.pop_back();
                if (!stack_.empty()) {
                    domains_ = stack_.back().domains;
                    ctexts_ = stack_.back().ctexts;
                    stack_.pop_back();
                }
            }
            break;
        default:
            break;
    }
}

std::string Violation::render() const {
    return "chrono=" + std::to_string(chrono) + " rule=" + rule +
           " expected: " + expected + "; found: " + found;
}

namespace {

// Full rule-level replay state; snapshots restore everything but the
// id counters.
struct ReplayState {
    DomainMap domains;
    std::map<ConstraintId, std::vector<VarId>> con_vars;
    std::map<ConstraintId, std::string> ctexts;
    std::optional<ConstraintId> active;
    std::set<ConstraintId> sleeping;
    std::optional<ConstraintId> rejected;
};

struct ReplayChecker {
    std::vector<Violation> violations;
    ReplayState st;
    std::vector<std::pair<int, ReplayState>> stack;
    bool terminated = false;
    std::uint64_t terminal_chrono = 0;

    void flag(const TraceEvent& e, std::string rule, std::string expected,
              std::string found) {
        if (violations.size() < 50)
            violations.push_back(Violation{e.chrono, std::move(rule),
                                           std::move(expected),
                                           std::move(found)});
    }

    std::string active_desc() const {
        if (st.active) return to_string(*st.active) + " active";
        return "no active constraint";
    }

    void check(const TraceEvent& e) {
        if (auto err = attribute_presence_error(e)) {
            flag(e, to_string(e.port), "attribute presence by port", *err);
            return;  // attributes unusable for rule checks
        }
        if (terminated)
            flag(e, "terminal", "no events after solution/failure",
                 std::string("event at chrono ") + std::to_string(e.chrono));
        switch (e.port) {
            case Port::NewVariable: {
                if (st.domains.count(*e.vid))
                    flag(e, "newVariable", "fresh variable id",
                         to_string(*e.vid) + " already introduced");
                st.domains[*e.vid] = *e.dom;
                break;
            }
            case Port::NewConstraint: {
                if (st.con_vars.count(*e.cid))
                    flag(e, "newConstraint", "fresh constraint id",
                         to_string(*e.cid) + " already live");
                if (st.active || st.rejected)
                    flag(e, "newConstraint", "A and R empty", active_desc());
                CtextInfo info;
                try {
                    info = parse_ctext(*e.ctext);
                } catch (const ParseError& pe) {
                    flag(e, "newConstraint", "parseable ctext", pe.what());
                    break;
                }
                for (VarId v : info.vars)
                    if (!st.domains.count(v))
                        flag(e, "newConstraint",
                             "Var(c) within declared variables",
                             to_string(v) + " not introduced");
                st.con_vars[*e.cid] = info.vars;
                st.ctexts[*e.cid] = *e.ctext;
                st.active = *e.cid;  // activation is folded into the post
                break;
            }
            case Port::Reduce: {
                if (st.rejected)
                    flag(e, "reduce", "R empty",
                         to_string(*st.rejected) + " rejected");
                if (e.cid == kLabelCid) {
                    if (st.active)
                        flag(e, "reduce",
                             "labeling reduce only outside propagation",
                             active_desc());
                } else if (st.active != *e.cid) {
                    flag(e, "reduce", to_string(*e.cid) + " active",
                         active_desc());
                } else {
                    auto cv = st.con_vars.find(*e.cid);
                    if (cv != st.con_vars.end() &&
                        std::find(cv->second.begin(), cv->second.end(),
                                  *e.vid) == cv->second.end())
                        flag(e, "reduce", "reduced variable in Var(c)",
                             to_string(*e.vid) + " not in " +
                                 to_string(*e.cid));
                }
                auto dit = st.domains.find(*e.vid);
                if (dit == st.domains.end()) {
                    flag(e, "reduce", "known variable",
                         to_string(*e.vid) + " not introduced");
                    break;
                }
                const FiniteDomain& current = dit->second;
                bool partition_ok = true;
                if (e.wd->empty()) {
                    flag(e, "reduce", "non-empty withdrawn set", "W=[]");
                    partition_ok = false;
                }
                if (!e.wd->subset_of(current)) {
                    flag(e, "reduce", "withdrawn within current domain",
                         "W=" + format_domain(*e.wd) + " current=" +
                             format_domain(current));
                    partition_ok = false;
                }
                FiniteDomain expect = current.minus(*e.wd);
                if (expect != *e.dom) {
                    flag(e, "reduce",
                         "dom = " + format_domain(expect),
                         "dom=" + format_domain(*e.dom));
                    partition_ok = false;
                }
                // The classifier's precondition only holds for an intact
                // partition.
                if (partition_ok) {
                    auto mods = classify_update(current, *e.dom);
                    if (mods != *e.mods)
                        flag(e, "reduce", "mods = " + format_mods(mods),
                             "mods=" + format_mods(*e.mods));
                }
                dit->second = *e.dom;
                break;
            }
            case Port::Suspend: {
                if (st.active != *e.cid)
                    flag(e, "suspend", to_string(*e.cid) + " active",
                         active_desc());
                if (st.rejected)
                    flag(e, "suspend", "R empty",
                         to_string(*st.rejected) + " rejected");
                st.active.reset();
                st.sleeping.insert(*e.cid);
                break;
            }
            case Port::Awake: {
                if (st.active)
                    flag(e, "awake", "A empty", active_desc());
                if (st.rejected)
                    flag(e, "awake", "R empty",
                         to_string(*st.rejected) + " rejected");
                if (!st.sleeping.count(*e.cid))
                    flag(e, "awake", to_string(*e.cid) + " sleeping",
                         "not in S");
                st.sleeping.erase(*e.cid);
                st.active = *e.cid;
                break;
            }
            case Port::Reject: {
                if (st.active != *e.cid)
                    flag(e, "reject", to_string(*e.cid) + " active",
                         active_desc());
                if (st.rejected)
                    flag(e, "reject", "R empty",
                         to_string(*st.rejected) + " already rejected");
                st.active.reset();
                st.rejected = *e.cid;
                break;
            }
            case Port::Solution: {
                for (const auto& [v, d] : st.domains)
                    if (!d.is_singleton()) {
                        flag(e, "solution", "all domains singleton",
                             to_string(v) + "=" + format_domain(d));
                        break;
                    }
                for (const auto& [v, value] : *e.bindings) {
                    auto it = st.domains.find(v);
                    if (it == st.domains.end())
                        flag(e, "solution", "bindings over known variables",
                             to_string(v) + " unknown");
                    else if (!it->second.is_singleton() ||
                             it->second.min() != value)
                        flag(e, "solution",
                             to_string(v) + "=" + format_domain(it->second),
                             to_string(v) + "=" + std::to_string(value));
                }
                terminated = true;
                terminal_chrono = e.chrono;
                break;
            }
            case Port::ChoicePoint: {
                for (const auto& [cp, snap] : stack)
                    if (cp == *e.cpid)
                        flag(e, "choicePoint", "fresh choice point id",
                             cp_name(*e.cpid) + " already on the stack");
                stack.emplace_back(*e.cpid, st);
                break;
            }
            case Port::BackTo: {
                if (!st.rejected)
                    flag(e, "backTo", "a rejected constraint (R = {c})",
                         "R empty");
                if (stack.empty()) {
                    flag(e, "backTo", "an open choice point", "empty stack");
                    break;
                }
                if (stack.back().first != *e.cpid)
                    flag(e, "backTo",
                         "newest choice point " +
                             cp_name(stack.back().first),
                         cp_name(*e.cpid));
                st = stack.back().second;
                st.active.reset();
                st.rejected.reset();
                stack.pop_back();
                break;
            }
            case Port::Failure: {
                if (!st.rejected)
                    flag(e, "failure", "a rejected constraint (R = {c})",
                         "R empty");
                if (!stack.empty())
                    flag(e, "failure", "no remaining choice point",
                         std::to_string(stack.size()) + " open");
                terminated = true;
                terminal_chrono = e.chrono;
                break;
            }
        }
    }
};

}  // namespace

std::vector<Violation> replay_check(const ParsedTrace& trace) {
    ReplayChecker checker;
    std::uint64_t expected_chrono = 1;
    for (const TraceEvent& e : trace.events) {
        if (e.chrono != expected_chrono)
            checker.flag(e, "chrono",
                         "dense numbering, next " +
                             std::to_string(expected_chrono),
                         std::to_string(e.chrono));
        expected_chrono = e.chrono + 1;
        checker.check(e);
    }
    return checker.violations;
}

namespace {

struct SyncPoint {
    enum Kind { Event, End } kind = Event;
    Port port = Port::Failure;
    std::optional<int> cpid;
    std::optional<Bindings> bindings;
    DomainMap domains;
    bool settled = true;  // domains are a quiescent/restored state
};

std::vector<SyncPoint> sync_points(const ParsedTrace& t) {
    std::vector<SyncPoint> out;
    DomainReplayer replay;
    for (const TraceEvent& e : t.events) {
        replay.apply(e);
        if (e.port == Port::ChoicePoint || e.port == Port::BackTo ||
            e.port == Port::Solution || e.port == Port::Reject ||
            e.port == Port::Failure) {
            SyncPoint sp;
            sp.port = e.port;
            sp.cpid = e.cpid;
            sp.bindings = e.bindings;
            sp.domains = replay.domains();
            out.push_back(std::move(sp));
        }
    }
    SyncPoint end;
    end.kind = SyncPoint::End;
    end.domains = replay.domains();
    // A trace that stops at a rejection ends in a mid-propagation state.
    end.settled = t.events.empty() || (t.events.back().port != Port::Reject &&
                                       t.events.back().port != Port::Failure);
    out.push_back(std::move(end));
    return out;
}

std::vector<int> creation_order(const ParsedTrace& t) {
    std::vector<int> out;
    for (const TraceEvent& e : t.events)
        if (e.port == Port::NewVariable && e.vid)
            out.push_back(e.vid->ordinal);
    return out;
}

std::string describe_sync(const SyncPoint& sp, std::size_t index) {
    if (sp.kind == SyncPoint::End) return "end of trace";
    return std::string(to_string(sp.port)) + " (sync point #" +
           std::to_string(index + 1) + ")";
}

}  // namespace

AlignmentReport align(const ParsedTrace& left, const ParsedTrace& right) {
    AlignmentReport report;

    if (!replay_check(left).empty()) {
        report.divergence = "left trace fails replay_check";
        return report;
    }
    if (!replay_check(right).empty()) {
        report.divergence = "right trace fails replay_check";
        return report;
    }

    std::vector<int> lvars = creation_order(left);
    std::vector<int> rvars = creation_order(right);
    if (lvars.size() != rvars.size()) {
        report.divergence = "variable creation counts differ (" +
                            std::to_string(lvars.size()) + " vs " +
                            std::to_string(rvars.size()) + ")";
        return report;
    }
    for (std::size_t i = 0; i < rvars.size(); ++i)
        report.var_map[rvars[i]] = lvars[i];

    auto map_domains = [&](const DomainMap& d) {
        DomainMap out;
        for (const auto& [v, dom] : d) {
            auto it = report.var_map.find(v.ordinal);
            out[VarId{it == report.var_map.end() ? v.ordinal : it->second}] =
                dom;
        }
        return out;
    };
    auto map_bindings = [&](const Bindings& b) {
        Bindings out;
        for (const auto& [v, value] : b) {
            auto it = report.var_map.find(v.ordinal);
            out[VarId{it == report.var_map.end() ? v.ordinal : it->second}] =
                value;
        }
        return out;
    };

    std::vector<SyncPoint> ls = sync_points(left);
    std::vector<SyncPoint> rs = sync_points(right);
    if (ls.size() != rs.size()) {
        report.divergence = "synchronization event counts differ (" +
                            std::to_string(ls.size() - 1) + " vs " +
                            std::to_string(rs.size() - 1) + ")";
        return report;
    }
    for (std::size_t i = 0; i < ls.size(); ++i) {
        const SyncPoint& a = ls[i];
        const SyncPoint& b = rs[i];
        if (a.kind != b.kind || (a.kind == SyncPoint::Event &&
                                 a.port != b.port)) {
            report.divergence = "sync sequence differs at " +
                                describe_sync(a, i) + " vs " +
                                describe_sync(b, i);
            return report;
        }
        if (a.kind == SyncPoint::Event &&
            (a.port == Port::ChoicePoint || a.port == Port::BackTo) &&
            a.cpid != b.cpid) {
            report.divergence =
                "choice point ids differ at " + describe_sync(a, i);
            return report;
        }
        if (a.kind == SyncPoint::Event && a.port == Port::Solution) {
            if (!a.bindings || !b.bindings ||
                *a.bindings != map_bindings(*b.bindings)) {
                report.divergence = "solution bindings differ";
                return report;
            }
        }
        // Mid-propagation states at rejection depend on revision order.
        if (a.kind == SyncPoint::Event &&
            (a.port == Port::Reject || a.port == Port::Failure))
            continue;
        if (a.kind == SyncPoint::End && (!a.settled || !b.settled)) continue;
        DomainMap mapped = map_domains(b.domains);
        if (mapped != a.domains) {
            for (const auto& [v, dom] : a.domains) {
                auto it = mapped.find(v);
                if (it == mapped.end()) {
                    report.divergence = to_string(v) + " missing at " +
                                        describe_sync(a, i);
                    return report;
                }
                if (it->second != dom) {
                    report.divergence =
                        to_string(v) + " is " + format_domain(dom) + " vs " +
                        format_domain(it->second) + " at " +
                        describe_sync(a, i);
                    return report;
                }
            }
            report.divergence = "extra variables at " + describe_sync(a, i);
            return report;
        }
    }

    // Greedy constraint matching by shared variables, one-to-many from
    // left to right; ties prefer a matching kind name. Informational only.
    struct ConInfo {
        int ordinal;
        std::string kind;
        std::set<int> vars;
    };
    auto collect = [&](const ParsedTrace& t, bool map_ids) {
        std::vector<ConInfo> out;
        for (const TraceEvent& e : t.events) {
            if (e.port != Port::NewConstraint || !e.cid || !e.ctext) continue;
            CtextInfo parsed = parse_ctext(*e.ctext);
            ConInfo info;
            info.ordinal = e.cid->ordinal;
            info.kind = parsed.kind;
            for (VarId v : parsed.vars) {
                int ord = v.ordinal;
                if (map_ids) {
                    auto it = report.var_map.find(ord);
                    if (it != report.var_map.end()) ord = it->second;
                }
                info.vars.insert(ord);
            }
            out.push_back(std::move(info));
        }
        return out;
    };
    std::vector<ConInfo> lcons = collect(left, false);
    std::vector<ConInfo> rcons = collect(right, true);
    for (const ConInfo& rc : rcons) {
        const ConInfo* best = nullptr;
        std::pair<std::size_t, int> best_score{0, 0};
        for (const ConInfo& lc : lcons) {
            std::size_t shared = 0;
            for (int v : rc.vars) shared += lc.vars.count(v);
            std::pair<std::size_t, int> score{shared, lc.kind == rc.kind};
            if (score > best_score) {
                best_score = score;
                best = &lc;
            }
        }
        if (best) report.con_map[best->ordinal].push_back(rc.ordinal);
    }

    report.equivalent = true;
    return report;
}

PrefixDiff diff_prefix(const ParsedTrace& golden, const ParsedTrace& full,
                       const NameMap& names) {
    PrefixDiff out;

    std::set<Port> golden_ports;
    for (const TraceEvent& e : golden.events) golden_ports.insert(e.port);
    std::vector<const TraceEvent*> filtered;
    for (const TraceEvent& e : full.events)
        if (golden_ports.count(e.port)) filtered.push_back(&e);

    auto fail = [&](const TraceEvent& g, const std::string& what) {
        out.divergence = "golden chrono " + std::to_string(g.chrono) + ": " +
                         what;
        return out;
    };

    std::set<int> used_vars, used_cons;
    for (std::size_t i = 0; i < golden.events.size(); ++i) {
        const TraceEvent& g = golden.events[i];
        if (i >= filtered.size())
            return fail(g, "trace has no matching event (too short)");
        const TraceEvent& f = *filtered[i];
        if (g.port != f.port)
            return fail(g, std::string("port ") + to_string(g.port) + " vs " +
                               to_string(f.port));

        auto bind_var = [&](VarId gv, VarId fv) -> bool {
            auto it = out.var_map.find(gv.ordinal);
            if (it != out.var_map.end()) return it->second == fv.ordinal;
            if (used_vars.count(fv.ordinal)) return false;
            out.var_map[gv.ordinal] = fv.ordinal;
            used_vars.insert(fv.ordinal);
            return true;
        };

        if (g.vid.has_value() != f.vid.has_value())
            return fail(g, "vid presence differs");
        if (g.vid && !bind_var(*g.vid, *f.vid))
            return fail(g, "variable ids do not admit a bijection (" +
                               to_string(*g.vid) + " vs " + to_string(*f.vid) +
                               ")");
        if (g.cid.has_value() != f.cid.has_value())
            return fail(g, "cid presence differs");
        if (g.cid) {
            auto it = out.con_map.find(g.cid->ordinal);
            if (it != out.con_map.end()) {
                if (it->second != f.cid->ordinal)
                    return fail(g, "constraint id mapping breaks (" +
                                       to_string(*g.cid) + " vs " +
                                       to_string(*f.cid) + ")");
            } else if (used_cons.count(f.cid->ordinal)) {
                return fail(g, "constraint ids do not admit a mapping");
            } else {
                out.con_map[g.cid->ordinal] = f.cid->ordinal;
                used_cons.insert(f.cid->ordinal);
            }
        }
        if (g.dom != f.dom)
            return fail(g, "domain " +
                               (g.dom ? format_domain(*g.dom) : "absent") +
                               " vs " +
                               (f.dom ? format_domain(*f.dom) : "absent"));
        if (g.wd != f.wd)
            return fail(g, "withdrawn " +
                               (g.wd ? format_domain(*g.wd) : "absent") +
                               " vs " +
                               (f.wd ? format_domain(*f.wd) : "absent"));
        if (g.mods != f.mods) return fail(g, "mods differ");
        if (g.cpid != f.cpid) return fail(g, "choice point ids differ");
        if (g.ctext.has_value() != f.ctext.has_value())
            return fail(g, "ctext presence differs");
        if (g.ctext) {
            std::string expected;
            try {
                expected = rewrite_ctext(*g.ctext, names, out.var_map);
            } catch (const ParseError& pe) {
                return fail(g, std::string("golden ctext unparseable: ") +
                                   pe.what());
            }
            if (expected != *f.ctext)
                return fail(g, "ctext " + expected + " vs " + *f.ctext);
        }
        if (g.bindings.has_value() != f.bindings.has_value())
            return fail(g, "bindings presence differs");
        if (g.bindings) {
            Bindings mapped;
            for (const auto& [v, value] : *g.bindings) {
                auto it = out.var_map.find(v.ordinal);
                mapped[VarId{it == out.var_map.end() ? v.ordinal
                                                     : it->second}] = value;
            }
            if (mapped != *f.bindings) return fail(g, "bindings differ");
        }
    }
    if (!golden.truncated && filtered.size() > golden.events.size()) {
        out.divergence = "trace has " +
                         std::to_string(filtered.size() -
                                        golden.events.size()) +
                         " extra events beyond the golden file";
        return out;
    }
    out.matches = true;
    return out;
}

}  // namespace fdt
