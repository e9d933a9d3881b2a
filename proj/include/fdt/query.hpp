#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fdt/program.hpp"
#include "fdt/ref_engine.hpp"
#include "fdt/trace.hpp"
#include "fdt/validate.hpp"

namespace fdt {

// Conjunction of atomic conditions over {chrono, port, cid, vid}; at most
// one condition per attribute, in-lists only for port/cid/vid.
class Filter {
public:
    enum class Key { Chrono, Port, Cid, Vid };
    enum class Op { Eq, Lt, Gt, In };

    struct Cond {
        Key key;
        Op op;
        std::uint64_t chrono = 0;
        std::vector<Port> ports;
        std::vector<int> ordinals;
    };

    Filter() = default;  // matches everything

    // Grammar: "port=reduce,chrono>3" or "port in (reject,solution)";
    // throws QueryError on malformed input.
    static Filter parse(std::string_view text);

    Filter& chrono_eq(std::uint64_t n) { return add_chrono(Op::Eq, n); }
    Filter& chrono_lt(std::uint64_t n) { return add_chrono(Op::Lt, n); }
    Filter& chrono_gt(std::uint64_t n) { return add_chrono(Op::Gt, n); }
    Filter& port_eq(Port p);
    Filter& port_in(std::vector<Port> ports);
    Filter& cid_eq(ConstraintId c);
    Filter& vid_eq(VarId v);

    bool matches(const TraceEvent& e) const;
    void validate() const;  // throws QueryError
    bool empty() const { return conds_.empty(); }

private:
    Filter& add_chrono(Op op, std::uint64_t n);
    std::vector<Cond> conds_;
};

// Streaming cursor over a trace. Forward search only; the cursor chrono
// strictly increases across successful fget calls.
class QuerySession {
public:
    virtual ~QuerySession() = default;

    // First event strictly after the cursor matching f, or end-of-trace.
    virtual std::optional<TraceEvent> fget(const Filter& f) = 0;

    // Requested attributes of the cursor event, rendered canonically.
    // "domains" and "constraints" return whole-state snapshots as of
    // immediately after the cursor event.
    std::map<std::string, std::string> get_attr(
        const std::vector<std::string>& names);

    const std::optional<TraceEvent>& cursor() const { return cursor_; }

protected:
    virtual DomainMap snapshot_domains() = 0;
    virtual std::map<ConstraintId, std::string> snapshot_constraints() = 0;

    std::optional<TraceEvent> cursor_;
};

// Post-mortem session over a stored canonical trace; a pure fold whose
// only state is the cursor. Snapshots are reconstructed by replay.
class StoredSession : public QuerySession {
public:
    explicit StoredSession(ParsedTrace trace);

    std::optional<TraceEvent> fget(const Filter& f) override;

protected:
    DomainMap snapshot_domains() override;
    std::map<ConstraintId, std::string> snapshot_constraints() override;

private:
    ParsedTrace trace_;
    std::size_t next_ = 0;  // index of the first unseen event
    DomainReplayer replay_;
};

enum class EngineKind { Ref, Fast };

// Session over a live engine run. The engine executes on a worker thread
// and blocks at every event until the filter of a pending fget either
// discards it (producer side) or hands it over; while a delivered event
// is current the engine stays parked, so whole-state snapshots read the
// engine directly. The session keeps its own copy of the program.
class LiveSession : public QuerySession {
public:
    LiveSession(Program p, Strategy s, EngineKind kind);
    ~LiveSession() override;

    std::optional<TraceEvent> fget(const Filter& f) override;

    // Discards all remaining events and returns the engine result.
    EngineResult finish();

protected:
    DomainMap snapshot_domains() override;
    std::map<ConstraintId, std::string> snapshot_constraints() override;

private:
    void worker(Strategy s, EngineKind kind);
    void on_event(const TraceEvent& e);

    Program prog_;
    std::thread thread_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::optional<Filter> want_;
    bool drain_ = false;
    std::optional<TraceEvent> handoff_;
    bool finished_ = false;
    std::exception_ptr error_;
    EngineResult result_;

    class RefEngine* ref_ = nullptr;
    class FastEngine* fast_ = nullptr;
};

struct CountResult {
    std::int64_t count = 0;
    std::optional<TraceEvent> stop;  // empty at end-of-trace
};

// Counts events on countPorts until the first stopPorts event (the
// failure-count query of the trace-analysis examples).
CountResult count_until(QuerySession& s, const std::vector<Port>& count_ports,
                        const std::vector<Port>& stop_ports);

// All remaining events matching f, in order.
std::vector<TraceEvent> collect(QuerySession& s, const Filter& f);

// Events per port from the cursor to end of trace.
std::map<Port, std::int64_t> port_histogram(QuerySession& s);

}  // namespace fdt
