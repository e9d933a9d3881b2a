#include "fdt/query.hpp"

#include <algorithm>
#include <cctype>

#include "fdt/error.hpp"
#include "fdt/fast_engine.hpp"

namespace fdt {

namespace {

const char* key_name(Filter::Key k) {
    switch (k) {
        case Filter::Key::Chrono: return "chrono";
        case Filter::Key::Port: return "port";
        case Filter::Key::Cid: return "cid";
        case Filter::Key::Vid: return "vid";
    }
    return "?";
}

}  // namespace

Filter& Filter::add_chrono(Op op, std::uint64_t n) {
    Cond c;
    c.key = Key::Chrono;
    c.op = op;
    c.chrono = n;
    conds_.push_back(c);
    return *this;
}

Filter& Filter::port_eq(Port p) {
    Cond c;
    c.key = Key::Port;
    c.op = Op::Eq;
    c.ports = {p};
    conds_.push_back(c);
    return *this;
}

Filter& Filter::port_in(std::vector<Port> ports) {
    Cond c;
    c.key = Key::Port;
    c.op = Op::In;
    c.ports = std::move(ports);
    conds_.push_back(c);
    return *this;
}

Filter& Filter::cid_eq(ConstraintId id) {
    Cond c;
    c.key = Key::Cid;
    c.op = Op::Eq;
    c.ordinals = {id.ordinal};
    conds_.push_back(c);
    return *this;
}

Filter& Filter::vid_eq(VarId v) {
    Cond c;
    c.key = Key::Vid;
    c.op = Op::Eq;
    c.ordinals = {v.ordinal};
    conds_.push_back(c);
    return *this;
}

void Filter::validate() const {
    bool seen[4] = {false, false, false, false};
    for (const Cond& c : conds_) {
        auto idx = static_cast<std::size_t>(c.key);
        if (seen[idx])
            throw QueryError(std::string("duplicate condition on ") +
                             key_name(c.key));
        seen[idx] = true;
        if (c.op == Op::In && c.key == Key::Chrono)
            throw QueryError("in-list is not allowed on chrono");
        if ((c.op == Op::Lt || c.op == Op::Gt) && c.key == Key::Port)
            throw QueryError("port has no ordering");
    }
}

bool Filter::matches(const TraceEvent& e) const {
    for (const Cond& c : conds_) {
        switch (c.key) {
            case Key::Chrono: {
                if (c.op == Op::Eq && e.chrono != c.chrono) return false;
                if (c.op == Op::Lt && !(e.chrono < c.chrono)) return false;
                if (c.op == Op::Gt && !(e.chrono > c.chrono)) return false;
                break;
            }
            case Key::Port: {
                bool found = std::find(c.ports.begin(), c.ports.end(),
                                       e.port) != c.ports.end();
                if (!found) return false;
                break;
            }
            case Key::Cid:
            case Key::Vid: {
                std::optional<int> ordinal;
                if (c.key == Key::Cid && e.cid) ordinal = e.cid->ordinal;
                if (c.key == Key::Vid && e.vid) ordinal = e.vid->ordinal;
                if (!ordinal) return false;
                if (c.op == Op::Eq && *ordinal != c.ordinals[0]) return false;
                if (c.op == Op::Lt && !(*ordinal < c.ordinals[0]))
                    return false;
                if (c.op == Op::Gt && !(*ordinal > c.ordinals[0]))
                    return false;
                if (c.op == Op::In &&
                    std::find(c.ordinals.begin(), c.ordinals.end(),
                              *ordinal) == c.ordinals.end())
                    return false;
                break;
            }
        }
    }
    return true;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

// Splits on commas that are not inside parentheses.
std::vector<std::string_view> split_conditions(std::string_view text) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || (text[i] == ',' && depth == 0)) {
            std::string_view part = trim(text.substr(start, i - start));
            if (!part.empty()) out.push_back(part);
            start = i + 1;
        } else if (text[i] == '(') {
            ++depth;
        } else if (text[i] == ')') {
            --depth;
        }
    }
    return out;
}

std::uint64_t parse_u64(std::string_view s) {
    if (s.empty()) throw QueryError("expected number");
    std::uint64_t n = 0;
    for (char ch : s) {
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw QueryError("malformed number: " + std::string(s));
        n = n * 10 + static_cast<std::uint64_t>(ch - '0');
    }
    return n;
}

Port parse_port_name(std::string_view s) {
    auto p = port_from_string(trim(s));
    if (!p) throw QueryError("unknown port: " + std::string(s));
    return *p;
}

int parse_ordinal(Filter::Key key, std::string_view s) {
    s = trim(s);
    char prefix = key == Filter::Key::Cid ? 'c' : 'v';
    if (s.size() < 2 || s[0] != prefix)
        throw QueryError("malformed id: " + std::string(s));
    return static_cast<int>(parse_u64(s.substr(1)));
}

}  // namespace

Filter Filter::parse(std::string_view text) {
    Filter f;
    for (std::string_view part : split_conditions(text)) {
        // "attr in (a,b)" or "attr<op>value"
        std::size_t sp = part.find(' ');
        std::size_t op_pos = part.find_first_of("=<>");
        Cond cond;
        if (sp != std::string_view::npos &&
            (op_pos == std::string_view::npos || sp < op_pos)) {
            std::string_view attr = trim(part.substr(0, sp));
            std::string_view rest = trim(part.substr(sp + 1));
            if (rest.substr(0, 2) != "in")
                throw QueryError("expected 'in' after attribute name");
            rest = trim(rest.substr(2));
            if (rest.size() < 2 || rest.front() != '(' || rest.back() != ')')
                throw QueryError("in-list needs parentheses");
            std::string_view items = rest.substr(1, rest.size() - 2);
            cond.op = Op::In;
            if (attr == "port") {
                cond.key = Key::Port;
                for (std::string_view item : split_conditions(items))
                    cond.ports.push_back(parse_port_name(item));
            } else if (attr == "cid" || attr == "vid") {
                cond.key = attr == "cid" ? Key::Cid : Key::Vid;
                for (std::string_view item : split_conditions(items))
                    cond.ordinals.push_back(parse_ordinal(cond.key, item));
            } else if (attr == "chrono") {
                throw QueryError("in-list is not allowed on chrono");
            } else {
                throw QueryError("unknown attribute: " + std::string(attr));
            }
        } else {
            if (op_pos == std::string_view::npos)
                throw QueryError("expected an operator in: " +
                                 std::string(part));
            std::string_view attr = trim(part.substr(0, op_pos));
            char op_ch = part[op_pos];
            std::string_view value = trim(part.substr(op_pos + 1));
            cond.op = op_ch == '=' ? Op::Eq : (op_ch == '<' ? Op::Lt : Op::Gt);
            if (attr == "chrono") {
                cond.key = Key::Chrono;
                cond.chrono = parse_u64(value);
            } else if (attr == "port") {
                cond.key = Key::Port;
                if (cond.op != Op::Eq) throw QueryError("port has no ordering");
                cond.ports = {parse_port_name(value)};
            } else if (attr == "cid" || attr == "vid") {
                cond.key = attr == "cid" ? Key::Cid : Key::Vid;
                cond.ordinals = {parse_ordinal(
                    attr == "cid" ? Key::Cid : Key::Vid, value)};
            } else {
                throw QueryError("unknown attribute: " + std::string(attr));
            }
        }
        f.conds_.push_back(std::move(cond));
    }
    f.validate();
    return f;
}

namespace {

std::string render_bindings_value(const Bindings& b) {
    std::string out;
    bool first = true;
    for (const auto& [v, value] : b) {
        if (!first) out += ',';
        first = false;
        out += to_string(v) + "=" + std::to_string(value);
    }
    return out;
}

}  // namespace

std::map<std::string, std::string> QuerySession::get_attr(
    const std::vector<std::string>& names) {
    if (!cursor_) throw QueryError("no current event (run fget first)");
    const TraceEvent& e = *cursor_;
    std::map<std::string, std::string> out;
    for (const std::string& name : names) {
        if (name == "chrono") {
            out[name] = std::to_string(e.chrono);
        } else if (name == "port") {
            out[name] = to_string(e.port);
        } else if (name == "cid") {
            if (!e.cid) throw AttributeError(name);
            out[name] = to_string(*e.cid);
        } else if (name == "vid") {
            if (!e.vid) throw AttributeError(name);
            out[name] = to_string(*e.vid);
        } else if (name == "dom") {
            if (!e.dom) throw AttributeError(name);
            out[name] = format_domain(*e.dom);
        } else if (name == "wd") {
            if (!e.wd) throw AttributeError(name);
            out[name] = format_domain(*e.wd);
        } else if (name == "mods") {
            if (!e.mods) throw AttributeError(name);
            out[name] = format_mods(*e.mods);
        } else if (name == "ctext") {
            if (!e.ctext) throw AttributeError(name);
            out[name] = *e.ctext;
        } else if (name == "bindings") {
            if (!e.bindings) throw AttributeError(name);
            out[name] = render_bindings_value(*e.bindings);
        } else if (name == "cpid") {
            if (!e.cpid) throw AttributeError(name);
            out[name] = cp_name(*e.cpid);
        } else if (name == "domains") {
            std::string rendered;
            bool first = true;
            for (const auto& [v, d] : snapshot_domains()) {
                if (!first) rendered += ',';
                first = false;
                rendered += to_string(v) + "=" + format_domain(d);
            }
            out[name] = rendered;
        } else if (name == "constraints") {
            std::string rendered;
            bool first = true;
            for (const auto& [c, text] : snapshot_constraints()) {
                if (!first) rendered += ';';
                first = false;
                rendered += to_string(c) + ":" + text;
            }
            out[name] = rendered;
        } else {
            throw QueryError("unknown attribute: " + name);
        }
    }
    return out;
}

StoredSession::StoredSession(ParsedTrace trace) : trace_(std::move(trace)) {}

std::optional<TraceEvent> StoredSession::fget(const Filter& f) {
    f.validate();
    while (next_ < trace_.events.size()) {
        const TraceEvent& e = trace_.events[next_++];
        replay_.apply(e);
        if (f.matches(e)) {
            cursor_ = e;
            return e;
        }
    }
    return std::nullopt;
}

DomainMap StoredSession::snapshot_domains() { return replay_.domains(); }

std::map<ConstraintId, std::string> StoredSession::snapshot_constraints() {
    return replay_.constraint_texts();
}

LiveSession::LiveSession(Program p, Strategy s, EngineKind kind)
    : prog_(std::move(p)) {
    thread_ = std::thread([this, s, kind] { worker(s, kind); });
}

LiveSession::~LiveSession() {
    {
        std::lock_guard<std::mutex> lk(mu_);
        drain_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
}

void LiveSession::worker(Strategy s, EngineKind kind) {
    CallbackSink sink([this](const TraceEvent& e) { on_event(e); });
    Emitter em(EmissionConfig::everything(), &sink);
    try {
        EngineResult result;
        if (kind == EngineKind::Ref) {
            RefEngine engine(prog_, s, em);
            {
                std::lock_guard<std::mutex> lk(mu_);
                ref_ = &engine;
            }
            while (engine.step()) {
            }
            result = engine.result();
            std::lock_guard<std::mutex> lk(mu_);
            ref_ = nullptr;
            result_ = result;
            finished_ = true;
        } else {
            FastEngine engine(prog_, s, em);
            {
                std::lock_guard<std::mutex> lk(mu_);
                fast_ = &engine;
            }
            result = engine.run();
            std::lock_guard<std::mutex> lk(mu_);
            fast_ = nullptr;
            result_ = result;
            finished_ = true;
        }
    } catch (...) {
        std::lock_guard<std::mutex> lk(mu_);
        ref_ = nullptr;
        fast_ = nullptr;
        error_ = std::current_exception();
        finished_ = true;
    }
    cv_.notify_all();
}

// Runs on the engine thread: every event parks here until the analyzer
// side releases it, either by filter mismatch (discard, engine resumes)
// or by a later fget after a handoff.
void LiveSession::on_event(const TraceEvent& e) {
    std::unique_lock<std::mutex> lk(mu_);
    cv_.wait(lk, [&] { return want_.has_value() || drain_; });
    if (drain_) return;
    if (!want_->matches(e)) return;  // producer-side discard
    handoff_ = e;
    want_.reset();
    cv_.notify_all();
    cv_.wait(lk, [&] { return want_.has_value() || drain_; });
}

std::optional<TraceEvent> LiveSession::fget(const Filter& f) {
    f.validate();
    std::unique_lock<std::mutex> lk(mu_);
    if (finished_) {
        if (error_) std::rethrow_exception(error_);
        return std::nullopt;
    }
    want_ = f;
    cv_.notify_all();
    cv_.wait(lk, [&] { return handoff_.has_value() || finished_; });
    if (handoff_) {
        cursor_ = std::move(handoff_);
        handoff_.reset();
        return cursor_;
    }
    want_.reset();
    if (error_) std::rethrow_exception(error_);
    return std::nullopt;
}

EngineResult LiveSession::finish() {
    std::unique_lock<std::mutex> lk(mu_);
    drain_ = true;
    cv_.notify_all();
    cv_.wait(lk, [&] { return finished_; });
    if (error_) std::rethrow_exception(error_);
    return result_;
}

DomainMap LiveSession::snapshot_domains() {
    std::lock_guard<std::mutex> lk(mu_);
    // The engine is parked at the cursor event (or done), so its state is
    // exactly the post-event state.
    if (ref_) return ref_->state().domains;
    if (fast_) return fast_->live_domains();
    throw QueryError("no live engine state (trace ended)");
}

std::map<ConstraintId, std::string> LiveSession::snapshot_constraints() {
    std::lock_guard<std::mutex> lk(mu_);
    std::map<ConstraintId, std::string> out;
    if (ref_) {
        for (const auto& [id, def] : ref_->state().constraints)
            out[id] = def.text();
        return out;
    }
    if (fast_) {
        for (const auto& [id, text] : fast_->live_constraints())
            out[id] = text;
        return out;
    }
    throw QueryError("no live engine state (trace ended)");
}

CountResult count_until(QuerySession& s, const std::vector<Port>& count_ports,
                        const std::vector<Port>& stop_ports) {
    for (Port p : count_ports)
        if (std::find(stop_ports.begin(), stop_ports.end(), p) !=
            stop_ports.end())
            throw QueryError("count and stop port sets overlap");
    std::vector<Port> all = count_ports;
    all.insert(all.end(), stop_ports.begin(), stop_ports.end());
    Filter f;
    f.port_in(all);
    CountResult out;
    while (auto e = s.fget(f)) {
        if (std::find(stop_ports.begin(), stop_ports.end(), e->port) !=
            stop_ports.end()) {
            out.stop = e;
            return out;
        }
        ++out.count;
    }
    return out;  // end-of-trace
}

std::vector<TraceEvent> collect(QuerySession& s, const Filter& f) {
    std::vector<TraceEvent> out;
    while (auto e = s.fget(f)) out.push_back(*e);
    return out;
}

std::map<Port, std::int64_t> port_histogram(QuerySession& s) {
    std::map<Port, std::int64_t> out;
    Filter all;
    while (auto e = s.fget(all)) ++out[e->port];
    return out;
}

}  // namespace fdt
