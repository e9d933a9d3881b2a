#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace fdt {

// Largest admissible domain value; variables created "full" range over
// 0..kFullMax.
inline constexpr int kFullMax = 268435455;  // 2^28 - 1

struct Interval {
    int lo = 0;
    int hi = 0;
    bool operator==(const Interval&) const = default;
};

// An ordered set of disjoint, non-adjacent, inclusive integer intervals
// within 0..kFullMax. Immutable after construction; all set operations
// return fresh values.
class FiniteDomain {
public:
    FiniteDomain() = default;  // empty domain

    static FiniteDomain full();
    static FiniteDomain range(int lo, int hi);  // empty when lo > hi
    static FiniteDomain singleton(int v);
    static FiniteDomain of(std::initializer_list<int> values);
    static FiniteDomain from_values(std::vector<int> values);
    // Normalizes: sorts, merges overlapping and adjacent intervals.
    static FiniteDomain from_intervals(std::vector<Interval> ivs);

    bool empty() const { return ivs_.empty(); }
    bool is_singleton() const;
    std::int64_t size() const;
    int min() const;  // pre: !empty()
    int max() const;  // pre: !empty()
    bool contains(int v) const;
    bool subset_of(const FiniteDomain& other) const;

    FiniteDomain minus(const FiniteDomain& w) const;
    FiniteDomain intersect(const FiniteDomain& o) const;
    FiniteDomain unite(const FiniteDomain& o) const;

    // In-place a \ b, reusing this domain's storage (for event hot paths).
    void assign_difference(const FiniteDomain& a, const FiniteDomain& b);

    std::vector<int> values() const;  // ascending enumeration
    const std::vector<Interval>& intervals() const { return ivs_; }

    bool operator==(const FiniteDomain&) const = default;

private:
    std::vector<Interval> ivs_;
};

// d \ w; w need not be a subset of d.
FiniteDomain remove(const FiniteDomain& d, const FiniteDomain& w);

// Domain-update classification. Declaration order is the canonical
// rendering order.
enum class UpdateKind { Min, Max, Ground, Any, Empty };

const char* to_string(UpdateKind k);

// Classifies old -> new_dom. pre: new_dom strict subset of old.
// Empty alone when new_dom is empty; otherwise Min/Max for tightened
// bounds, Ground for a singleton result (may co-occur with Min/Max),
// Any when neither bound moved.
std::vector<UpdateKind> classify_update(const FiniteDomain& old_dom,
                                        const FiniteDomain& new_dom);

// Same classification into an existing vector (storage reuse).
void classify_update_into(const FiniteDomain& old_dom,
                          const FiniteDomain& new_dom,
                          std::vector<UpdateKind>& out);

// Compact bitmask over UpdateKind, used for wake subscriptions and
// accumulated change records.
using KindSet = std::uint8_t;

inline constexpr KindSet kind_bit(UpdateKind k) {
    return static_cast<KindSet>(1u << static_cast<unsigned>(k));
}

KindSet kind_set(const std::vector<UpdateKind>& kinds);

// Canonical text form: "[2,5-7]"; empty domain is "[]".
std::string format_domain(const FiniteDomain& d);
std::string format_mods(const std::vector<UpdateKind>& mods);

// Inverse of format_domain; throws ParseError (column = offset into s).
FiniteDomain parse_domain(std::string_view s);
std::vector<UpdateKind> parse_mods(std::string_view s);

}  // namespace fdt
