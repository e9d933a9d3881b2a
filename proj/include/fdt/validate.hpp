#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdt/constraint.hpp"
#include "fdt/trace.hpp"

namespace fdt {

// Structural view of a newConstraint's surface text; the kind is kept as
// written so paper-named golden traces stay parseable.
struct CtextInfo {
    std::string kind;
    std::vector<VarId> vars;  // argument order
};

CtextInfo parse_ctext(std::string_view s);

// Kind-name translation used when diffing against paper-derived golden
// traces (e.g. fd_element=element). One "from=to" pair per line, '#'
// comments.
using NameMap = std::map<std::string, std::string>;

NameMap parse_name_map(std::string_view text);
NameMap load_name_map(const std::string& path);

// Rewrites a golden-side ctext into local conventions: kind through the
// name map, variable ids through ordinal mapping.
std::string rewrite_ctext(std::string_view raw, const NameMap& names,
                          const std::map<int, int>& var_map);

// Lightweight forward replay of domains and live constraints. Tolerates
// port-filtered traces (it only trusts the attributes it sees); shared by
// query snapshots, viz sampling and the aligner.
class DomainReplayer {
public:
    void apply(const TraceEvent& e);

    const DomainMap& domains() const { return domains_; }
    const std::map<ConstraintId, std::string>& constraint_texts() const {
        return ctexts_;
    }

private:
    struct Snapshot {
        int cpid;
        DomainMap domains;
        std::map<ConstraintId, std::string> ctexts;
    };
    DomainMap domains_;
    std::map<ConstraintId, std::string> ctexts_;
    std::vector<Snapshot> stack_;
};

struct Violation {
    std::uint64_t chrono = 0;
    std::string rule;      // port or invariant name
    std::string expected;
    std::string found;

    std::string render() const;
};

// Replays a canonical trace against the transition rules' pre- and
// postconditions. Independent of both engines' dispatch: only the domain
// arithmetic and the update classifier are shared.
std::vector<Violation> replay_check(const ParsedTrace& trace);

struct AlignmentReport {
    bool equivalent = false;
    std::string divergence;  // first divergence when not equivalent
    // Right-trace ordinal -> left-trace ordinal, by creation order.
    std::map<int, int> var_map;
    // Left constraint ordinal -> matched right ordinals (one-to-many).
    std::map<int, std::vector<int>> con_map;
};

// Trace equivalence up to id renaming, constraint splitting and the
// full-initial-domain convention: both traces must visit the same
// per-variable domains at every synchronization point (choicePoint,
// backTo, solution) and at end of trace, with matching search-event
// sequences. Domains at reject are not compared: they are mid-propagation
// states and depend on revision order.
AlignmentReport align(const ParsedTrace& left, const ParsedTrace& right);

struct PrefixDiff {
    bool matches = false;
    std::string divergence;
    std::map<int, int> var_map;  // golden ordinal -> trace ordinal
    std::map<int, int> con_map;
};

// Position-wise comparison of a (possibly truncated) golden trace against
// a full trace restricted to the ports the golden uses; chronos are
// compared by position, ids through discovered bijections, constraint
// kinds through the name map.
PrefixDiff diff_prefix(const ParsedTrace& golden, const ParsedTrace& full,
                       const NameMap& names = {});

}  // namespace fdt
