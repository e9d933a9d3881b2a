#include "fdt/domain.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <stdexcept>

#include "fdt/error.hpp"

namespace fdt {

namespace {

void check_bounds(int lo, int hi) {
    if (lo < 0 || hi > kFullMax)
        throw std::logic_error("domain value out of 0.." +
                               std::to_string(kFullMax));
}

}  // namespace

FiniteDomain FiniteDomain::full() { return range(0, kFullMax); }

FiniteDomain FiniteDomain::range(int lo, int hi) {
    FiniteDomain d;
    if (lo > hi) return d;
    check_bounds(lo, hi);
    d.ivs_.push_back({lo, hi});
    return d;
}

FiniteDomain FiniteDomain::singleton(int v) { return range(v, v); }

FiniteDomain FiniteDomain::of(std::initializer_list<int> values) {
    return from_values(std::vector<int>(values));
}

FiniteDomain FiniteDomain::from_values(std::vector<int> values) {
    std::vector<Interval> ivs;
    ivs.reserve(values.size());
    for (int v : values) ivs.push_back({v, v});
    return from_intervals(std::move(ivs));
}

FiniteDomain FiniteDomain::from_intervals(std::vector<Interval> ivs) {
    std::erase_if(ivs, [](const Interval& iv) { return iv.lo > iv.hi; });
    std::sort(ivs.begin(), ivs.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    FiniteDomain d;
    for (const Interval& iv : ivs) {
        check_bounds(iv.lo, iv.hi);
        if (!d.ivs_.empty() && iv.lo <= d.ivs_.back().hi + 1)
            d.ivs_.back().hi = std::max(d.ivs_.back().hi, iv.hi);
        else
            d.ivs_.push_back(iv);
    }
    return d;
}

bool FiniteDomain::is_singleton() const {
    return ivs_.size() == 1 && ivs_[0].lo == ivs_[0].hi;
}

std::int64_t FiniteDomain::size() const {
    std::int64_t n = 0;
    for (const Interval& iv : ivs_) n += std::int64_t(iv.hi) - iv.lo + 1;
    return n;
}

int FiniteDomain::min() const {
    assert(!empty());
    return ivs_.front().lo;
}

int FiniteDomain::max() const {
    assert(!empty());
    return ivs_.back().hi;
}

bool FiniteDomain::contains(int v) const {
    auto it = std::upper_bound(
        ivs_.begin(), ivs_.end(), v,
        [](int x, const Interval& iv) { return x < iv.lo; });
    return it != ivs_.begin() && v <= std::prev(it)->hi;
}

bool FiniteDomain::subset_of(const FiniteDomain& other) const {
    return intersect(other) == *this;
}

FiniteDomain FiniteDomain::minus(const FiniteDomain& w) const {
    FiniteDomain out;
    out.assign_difference(*this, w);
    return out;
}

void FiniteDomain::assign_difference(const FiniteDomain& a,
                                     const FiniteDomain& b) {
    assert(this != &a && this != &b);
    ivs_.clear();
    auto wit = b.ivs_.begin();
    for (const Interval& iv : a.ivs_) {
        int lo = iv.lo;
        while (wit != b.ivs_.end() && wit->hi < lo) ++wit;
        auto cut = wit;
        while (cut != b.ivs_.end() && cut->lo <= iv.hi) {
            if (cut->lo > lo) ivs_.push_back({lo, cut->lo - 1});
            lo = cut->hi + 1;
            if (lo > iv.hi) break;
            ++cut;
        }
        if (lo <= iv.hi) ivs_.push_back({lo, iv.hi});
    }
}

FiniteDomain FiniteDomain::intersect(const FiniteDomain& o) const {
    FiniteDomain out;
    auto a = ivs_.begin();
    auto b = o.ivs_.begin();
    while (a != ivs_.end() && b != o.ivs_.end()) {
        int lo = std::max(a->lo, b->lo);
        int hi = std::min(a->hi, b->hi);
        if (lo <= hi) out.ivs_.push_back({lo, hi});
        if (a->hi < b->hi)
            ++a;
        else
            ++b;
    }
    return out;
}

FiniteDomain FiniteDomain::unite(const FiniteDomain& o) const {
    std::vector<Interval> all = ivs_;
    all.insert(all.end(), o.ivs_.begin(), o.ivs_.end());
    return from_intervals(std::move(all));
}

std::vector<int> FiniteDomain::values() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (const Interval& iv : ivs_)
        for (int v = iv.lo; v <= iv.hi; ++v) out.push_back(v);
    return out;
}

FiniteDomain remove(const FiniteDomain& d, const FiniteDomain& w) {
    return d.minus(w);
}

const char* to_string(UpdateKind k) {
    switch (k) {
        case UpdateKind::Min: return "min";
        case UpdateKind::Max: return "max";
        case UpdateKind::Ground: return "ground";
        case UpdateKind::Any: return "any";
        case UpdateKind::Empty: return "empty";
    }
    return "?";
}

std::vector<UpdateKind> classify_update(const FiniteDomain& old_dom,
                                        const FiniteDomain& new_dom) {
    std::vector<UpdateKind> out;
    classify_update_into(old_dom, new_dom, out);
    return out;
}

void classify_update_into(const FiniteDomain& old_dom,
                          const FiniteDomain& new_dom,
                          std::vector<UpdateKind>& out) {
    if (new_dom == old_dom || !new_dom.subset_of(old_dom))
        throw std::logic_error(
            "classify_update: new domain must be a strict subset of old");
    out.clear();
    if (new_dom.empty()) {
        out.push_back(UpdateKind::Empty);
        return;
    }
    if (new_dom.min() > old_dom.min()) out.push_back(UpdateKind::Min);
    if (new_dom.max() < old_dom.max()) out.push_back(UpdateKind::Max);
    if (new_dom.is_singleton()) out.push_back(UpdateKind::Ground);
    if (out.empty()) out.push_back(UpdateKind::Any);
}

KindSet kind_set(const std::vector<UpdateKind>& kinds) {
    KindSet s = 0;
    for (UpdateKind k : kinds) s |= kind_bit(k);
    return s;
}

std::string format_domain(const FiniteDomain& d) {
    std::string out = "[";
    bool first = true;
    for (const Interval& iv : d.intervals()) {
        if (!first) out += ',';
        first = false;
        out += std::to_string(iv.lo);
        if (iv.hi != iv.lo) {
            out += '-';
            out += std::to_string(iv.hi);
        }
    }
    out += ']';
    return out;
}

std::string format_mods(const std::vector<UpdateKind>& mods) {
    std::string out = "[";
    for (std::size_t i = 0; i < mods.size(); ++i) {
        if (i) out += ',';
        out += to_string(mods[i]);
    }
    out += ']';
    return out;
}

namespace {

// Shared scanner for the bracketed list grammars. Column numbers are
// 1-based offsets into the input.
struct ListScanner {
    std::string_view s;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, 1, pos + 1);
    }
    bool done() const { return pos >= s.size(); }
    char peek() const { return done() ? '\0' : s[pos]; }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }
    int integer() {
        int value = 0;
        auto [ptr, ec] =
            std::from_chars(s.data() + pos, s.data() + s.size(), value);
        if (ec != std::errc() || ptr == s.data() + pos)
            fail("expected integer");
        pos = static_cast<std::size_t>(ptr - s.data());
        return value;
    }
};

}  // namespace

FiniteDomain parse_domain(std::string_view s) {
    ListScanner sc{s};
    sc.expect('[');
    std::vector<Interval> ivs;
    if (sc.peek() != ']') {
        for (;;) {
            int lo = sc.integer();
            int hi = lo;
            if (sc.peek() == '-') {
                ++sc.pos;
                hi = sc.integer();
            }
            if (lo > hi) sc.fail("descending interval");
            ivs.push_back({lo, hi});
            if (sc.peek() != ',') break;
            ++sc.pos;
        }
    }
    sc.expect(']');
    if (!sc.done()) sc.fail("trailing characters after domain");
    // Non-canonical input (adjacent or unsorted items, as in the paper's
    // "[1,2,3]" notation) is accepted and normalized.
    return FiniteDomain::from_intervals(std::move(ivs));
}

std::vector<UpdateKind> parse_mods(std::string_view s) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw ParseError("expected bracketed mods list", 1, 1);
    std::vector<UpdateKind> out;
    std::string_view body = s.substr(1, s.size() - 2);
    std::size_t start = 0;
    while (start <= body.size() && !body.empty()) {
        std::size_t comma = body.find(',', start);
        std::string_view word = body.substr(
            start, comma == std::string_view::npos ? comma : comma - start);
        bool known = false;
        for (UpdateKind k : {UpdateKind::Min, UpdateKind::Max,
                             UpdateKind::Ground, UpdateKind::Any,
                             UpdateKind::Empty}) {
            if (word == to_string(k)) {
                out.push_back(k);
                known = true;
                break;
            }
        }
        if (!known)
            throw ParseError("unknown update kind: " + std::string(word), 1,
                             start + 2);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace fdt
