#include "fdt/trace.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fdt/error.hpp"

namespace fdt {

namespace {

constexpr std::array<const char*, kPortCount> kPortNames = {
    "newVariable", "newConstraint", "reduce",      "suspend", "awake",
    "reject",      "solution",      "choicePoint", "backTo",  "failure"};

AttrSet required_attrs_impl(Port p) {
    switch (p) {
        case Port::NewVariable:
            return attr_bit(Attr::Vid) | attr_bit(Attr::Dom);
        case Port::NewConstraint:
            return attr_bit(Attr::Cid) | attr_bit(Attr::Ctext);
        case Port::Reduce:
            return attr_bit(Attr::Cid) | attr_bit(Attr::Vid) |
                   attr_bit(Attr::Dom) | attr_bit(Attr::Wd) |
                   attr_bit(Attr::Mods);
        case Port::Suspend:
        case Port::Awake:
        case Port::Reject:
            return attr_bit(Attr::Cid);
        case Port::Solution:
            return attr_bit(Attr::Bindings);
        case Port::ChoicePoint:
        case Port::BackTo:
            return attr_bit(Attr::Cpid);
        case Port::Failure:
            return 0;
    }
    return 0;
}

AttrSet present_attrs(const TraceEvent& e) {
    AttrSet s = 0;
    if (e.cid) s |= attr_bit(Attr::Cid);
    if (e.vid) s |= attr_bit(Attr::Vid);
    if (e.dom) s |= attr_bit(Attr::Dom);
    if (e.wd) s |= attr_bit(Attr::Wd);
    if (e.mods) s |= attr_bit(Attr::Mods);
    if (e.ctext) s |= attr_bit(Attr::Ctext);
    if (e.bindings) s |= attr_bit(Attr::Bindings);
    if (e.cpid) s |= attr_bit(Attr::Cpid);
    return s;
}

std::string format_bindings(const Bindings& b) {
    std::string out;
    bool first = true;
    for (const auto& [v, val] : b) {
        if (!first) out += ',';
        first = false;
        out += to_string(v) + "=" + std::to_string(val);
    }
    return out;
}

}  // namespace

const char* to_string(Port p) {
    return kPortNames[static_cast<std::size_t>(p)];
}

std::uint8_t required_attrs(Port p) { return required_attrs_impl(p); }

std::optional<Port> port_from_string(std::string_view s) {
    for (int i = 0; i < kPortCount; ++i)
        if (s == kPortNames[static_cast<std::size_t>(i)])
            return static_cast<Port>(i);
    return std::nullopt;
}

std::optional<std::string> attribute_presence_error(const TraceEvent& e) {
    AttrSet need = required_attrs(e.port);
    AttrSet have = present_attrs(e);
    if (need == have) return std::nullopt;
    std::string msg = std::string(to_string(e.port)) + " event has ";
    msg += have < need ? "missing" : "unexpected";
    msg += " attributes";
    if (e.port == Port::Reduce && e.wd && e.wd->empty())
        msg += " (empty withdrawn set)";
    return msg;
}

TraceEvent project(TraceEvent e, AttrSet keep) {
    if (!(keep & attr_bit(Attr::Cid))) e.cid.reset();
    if (!(keep & attr_bit(Attr::Vid))) e.vid.reset();
    if (!(keep & attr_bit(Attr::Dom))) e.dom.reset();
    if (!(keep & attr_bit(Attr::Wd))) e.wd.reset();
    if (!(keep & attr_bit(Attr::Mods))) e.mods.reset();
    if (!(keep & attr_bit(Attr::Ctext))) e.ctext.reset();
    if (!(keep & attr_bit(Attr::Bindings))) e.bindings.reset();
    if (!(keep & attr_bit(Attr::Cpid))) e.cpid.reset();
    return e;
}

void Emitter::deliver(const TraceEvent& e) {
    if (!wants(e.port)) return;
    const AttrSet keep = cfg_.attrs_for(e.port);
    try {
        if (keep == kAllAttrs)
            sink_->on_event(e);
        else
            sink_->on_event(project(e, keep));
    } catch (const TraceError&) {
        throw;
    } catch (const std::exception& ex) {
        throw TraceError(std::string("trace sink failed: ") + ex.what());
    }
}

void StreamSink::on_event(const TraceEvent& e) {
    os_ << (fmt_ == TraceFormat::Canonical ? render_canonical(e)
                                           : render_human(e))
        << '\n';
    if (!os_) throw TraceError("trace stream write failed");
}

std::string render_human(const TraceEvent& e) {
    std::string chrono = std::to_string(e.chrono);
    std::string out;
    if (chrono.size() < 2) out += ' ';
    out += chrono;
    out += ' ';
    std::string port = to_string(e.port);
    // Fig.-3 columns: declaration ports pad to 13, the rest to 8.
    std::size_t width =
        (e.port == Port::NewVariable || e.port == Port::NewConstraint) ? 13
                                                                       : 8;
    out += port;
    std::string rest;
    switch (e.port) {
        case Port::NewVariable:
            rest = to_string(*e.vid) + " =" + format_domain(*e.dom);
            break;
        case Port::NewConstraint:
            rest = to_string(*e.cid) + "  " + *e.ctext;
            break;
        case Port::Reduce: {
            std::string domf = "=" + format_domain(*e.dom);
            if (domf.size() < 8) domf.resize(8, ' ');
            rest = to_string(*e.cid) + "   " + to_string(*e.vid) + " " + domf +
                   "   W=" + format_domain(*e.wd);
            break;
        }
        case Port::Suspend:
        case Port::Awake:
        case Port::Reject:
            rest = to_string(*e.cid);
            break;
        case Port::Solution:
            rest = format_bindings(*e.bindings);
            break;
        case Port::ChoicePoint:
        case Port::BackTo:
            rest = cp_name(*e.cpid);
            break;
        case Port::Failure:
            break;
    }
    if (!rest.empty()) {
        if (port.size() < width) out.append(width - port.size(), ' ');
        out += ' ';
        out += rest;
    }
    return out;
}

std::string render_canonical(const TraceEvent& e) {
    std::string out = "chrono=" + std::to_string(e.chrono);
    out += " port=";
    out += to_string(e.port);
    if (e.cid) out += " cid=" + to_string(*e.cid);
    if (e.vid) out += " vid=" + to_string(*e.vid);
    if (e.dom) out += " dom=" + format_domain(*e.dom);
    if (e.wd) out += " wd=" + format_domain(*e.wd);
    if (e.mods) out += " mods=" + format_mods(*e.mods);
    if (e.ctext) out += " ctext=" + *e.ctext;
    if (e.bindings) out += " bindings=" + format_bindings(*e.bindings);
    if (e.cpid) out += " cpid=" + cp_name(*e.cpid);
    return out;
}

namespace {

Bindings parse_bindings(std::string_view s, std::size_t col) {
    Bindings out;
    std::size_t start = 0;
    while (start < s.size()) {
        std::size_t comma = s.find(',', start);
        std::string_view pair = s.substr(
            start, comma == std::string_view::npos ? comma : comma - start);
        std::size_t eq = pair.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("malformed binding", 1, col);
        VarId v = parse_var_id(pair.substr(0, eq));
        int value = 0;
        std::string_view num = pair.substr(eq + 1);
        auto [ptr, ec] =
            std::from_chars(num.data(), num.data() + num.size(), value);
        if (ec != std::errc() || ptr != num.data() + num.size())
            throw ParseError("malformed binding value", 1, col);
        if (!out.emplace(v, value).second)
            throw ParseError("duplicate binding for " + to_string(v), 1, col);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

TraceEvent parse_canonical(std::string_view line) {
    TraceEvent e;
    bool have_chrono = false;
    bool have_port = false;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        if (pos >= line.size()) break;
        std::size_t end = line.find(' ', pos);
        if (end == std::string_view::npos) end = line.size();
        std::string_view field = line.substr(pos, end - pos);
        std::size_t col = pos + 1;
        pos = end;
        std::size_t eq = field.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("expected key=value field", 1, col);
        std::string_view key = field.substr(0, eq);
        std::string_view value = field.substr(eq + 1);
        if (key == "chrono") {
            auto [ptr, ec] = std::from_chars(
                value.data(), value.data() + value.size(), e.chrono);
            if (ec != std::errc() || ptr != value.data() + value.size())
                throw ParseError("malformed chrono", 1, col);
            have_chrono = true;
        } else if (key == "port") {
            auto p = port_from_string(value);
            if (!p) throw ParseError("unknown port: " + std::string(value), 1,
                                     col);
            e.port = *p;
            have_port = true;
        } else if (key == "cid") {
            e.cid = parse_constraint_id(value);
        } else if (key == "vid") {
            e.vid = parse_var_id(value);
        } else if (key == "dom") {
            e.dom = parse_domain(value);
        } else if (key == "wd") {
            e.wd = parse_domain(value);
        } else if (key == "mods") {
            e.mods = parse_mods(value);
        } else if (key == "ctext") {
            e.ctext = std::string(value);
        } else if (key == "bindings") {
            e.bindings = parse_bindings(value, col);
        } else if (key == "cpid") {
            e.cpid = parse_cp_name(value);
        } else {
            throw ParseError("unknown field: " + std::string(key), 1, col);
        }
    }
    if (!have_chrono || !have_port)
        throw ParseError("event needs chrono and port", 1, 1);
    return e;
}

ParsedTrace parse_trace(std::string_view text) {
    ParsedTrace out;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size() && start < text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line = text.substr(
            start, nl == std::string_view::npos ? nl : nl - start);
        ++lineno;
        start = nl == std::string_view::npos ? text.size() : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line == "...") {
            out.truncated = true;
            if (start < text.size())
                throw ParseError("'...' must be the final line", lineno, 1);
            break;
        }
        if (out.truncated)
            throw ParseError("events after '...'", lineno, 1);
        try {
            out.events.push_back(parse_canonical(line));
        } catch (const ParseError& pe) {
            throw ParseError(pe.what(), lineno, pe.column());
        }
    }
    return out;
}

ParsedTrace load_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TraceError("cannot open trace file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_trace(ss.str());
}

std::string render_trace(const std::vector<TraceEvent>& events,
                         TraceFormat fmt, bool truncated) {
    std::string out;
    for (const TraceEvent& e : events) {
        out += fmt == TraceFormat::Canonical ? render_canonical(e)
                                             : render_human(e);
        out += '\n';
    }
    if (truncated) out += "...\n";
    return out;
}

}  // namespace fdt
