#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdt/domain.hpp"
#include "fdt/ids.hpp"

namespace fdt {

// Event types. The first six plus Solution follow the semantics' rules;
// ChoicePoint, BackTo and Failure are search plumbing.
enum class Port {
    NewVariable,
    NewConstraint,
    Reduce,
    Suspend,
    Awake,
    Reject,
    Solution,
    ChoicePoint,
    BackTo,
    Failure,
};

inline constexpr int kPortCount = 10;

const char* to_string(Port p);
std::optional<Port> port_from_string(std::string_view s);

using Bindings = std::map<VarId, int>;

// One rule application. Attribute presence is fixed per port:
//   newVariable  {vid, dom}        newConstraint {cid, ctext}
//   reduce       {cid, vid, dom, wd, mods}
//   suspend/awake/reject {cid}     solution {bindings}
//   choicePoint/backTo {cpid}      failure {}
struct TraceEvent {
    std::uint64_t chrono = 0;
    Port port = Port::Failure;
    std::optional<ConstraintId> cid;
    std::optional<VarId> vid;
    std::optional<FiniteDomain> dom;
    std::optional<FiniteDomain> wd;
    std::optional<std::vector<UpdateKind>> mods;
    std::optional<std::string> ctext;
    std::optional<Bindings> bindings;
    std::optional<int> cpid;

    bool operator==(const TraceEvent&) const = default;
};

// Returns an error message when e's attributes do not match its port.
std::optional<std::string> attribute_presence_error(const TraceEvent& e);

// Attribute presence by port, as a bitmask over Attr (declared below).
std::uint8_t required_attrs(Port p);

// Attributes that can be switched off per port; chrono and port always ship.
enum class Attr { Cid, Vid, Dom, Wd, Mods, Ctext, Bindings, Cpid };
inline constexpr int kAttrCount = 8;

using AttrSet = std::uint8_t;
inline constexpr AttrSet kAllAttrs = 0xff;

inline constexpr AttrSet attr_bit(Attr a) {
    return static_cast<AttrSet>(1u << static_cast<unsigned>(a));
}

struct EmissionConfig {
    std::uint16_t ports = 0x3ff;  // all ten
    std::array<AttrSet, kPortCount> attrs{};

    EmissionConfig() { attrs.fill(kAllAttrs); }

    static EmissionConfig everything() { return {}; }
    static EmissionConfig nothing() {
        EmissionConfig c;
        c.ports = 0;
        return c;
    }

    bool wants(Port p) const {
        return ports & (1u << static_cast<unsigned>(p));
    }
    void enable(Port p, bool on) {
        const auto bit = 1u << static_cast<unsigned>(p);
        ports = on ? (ports | bit) : (ports & ~bit);
    }
    AttrSet attrs_for(Port p) const {
        return attrs[static_cast<std::size_t>(p)];
    }
};

// Copy of e with attributes outside `keep` removed.
TraceEvent project(TraceEvent e, AttrSet keep);

class TraceSink {
public:
    virtual ~TraceSink() = default;
    // Throwing here aborts the traced run (wrapped into TraceError).
    virtual void on_event(const TraceEvent& e) = 0;
};

class CallbackSink : public TraceSink {
public:
    explicit CallbackSink(std::function<void(const TraceEvent&)> fn)
        : fn_(std::move(fn)) {}
    void on_event(const TraceEvent& e) override { fn_(e); }

private:
    std::function<void(const TraceEvent&)> fn_;
};

class VectorSink : public TraceSink {
public:
    explicit VectorSink(std::vector<TraceEvent>& out) : out_(out) {}
    void on_event(const TraceEvent& e) override { out_.push_back(e); }

private:
    std::vector<TraceEvent>& out_;
};

enum class TraceFormat { Canonical, Human };

class StreamSink : public TraceSink {
public:
    StreamSink(std::ostream& os, TraceFormat fmt) : os_(os), fmt_(fmt) {}
    void on_event(const TraceEvent& e) override;

private:
    std::ostream& os_;
    TraceFormat fmt_;
};

// Event delivery. chrono advances for every event, including suppressed
// ones, so traces taken under different configs stay correlated. With an
// empty port set the per-event cost is the tick plus one branch.
class Emitter {
public:
    Emitter() : cfg_(EmissionConfig::nothing()), sink_(nullptr) {}
    Emitter(EmissionConfig cfg, TraceSink* sink) : cfg_(cfg), sink_(sink) {}

    std::uint64_t tick() { return ++chrono_; }
    std::uint64_t chrono() const { return chrono_; }

    bool wants(Port p) const { return sink_ != nullptr && cfg_.wants(p); }

    // pre: e satisfies the attribute-presence invariant and carries the
    // chrono obtained from tick(). Delivery is synchronous; with an
    // unrestricted attribute set the event is passed through untouched.
    void deliver(const TraceEvent& e);

private:
    EmissionConfig cfg_;
    TraceSink* sink_;
    std::uint64_t chrono_ = 0;
};

// Fig.-3-style console layout.
std::string render_human(const TraceEvent& e);

// Machine format: space-separated key=value fields in fixed order
// "chrono port cid vid dom wd mods ctext bindings cpid"; absent
// attributes omitted.
std::string render_canonical(const TraceEvent& e);
TraceEvent parse_canonical(std::string_view line);

struct ParsedTrace {
    std::vector<TraceEvent> events;
    bool truncated = false;  // file ended with a "..." marker
};

// Parses newline-separated canonical lines; "..." as the final line marks
// a truncated (prefix-only) trace. Throws ParseError with line numbers.
ParsedTrace parse_trace(std::string_view text);
ParsedTrace load_trace(const std::string& path);

std::string render_trace(const std::vector<TraceEvent>& events,
                         TraceFormat fmt, bool truncated = false);

}  // namespace fdt
