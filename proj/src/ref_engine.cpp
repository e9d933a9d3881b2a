#include "fdt/ref_engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace fdt {

RefEngine::RefEngine(const Program& p, Strategy s, Emitter& em)
    : prog_(p), strat_(s), em_(em) {
    slot_vars_.resize(static_cast<std::size_t>(p.slot_count));
    frames_.push_back({&p.items, 0});
}

bool RefEngine::is_hidden(VarId v) const {
    auto i = static_cast<std::size_t>(v.ordinal);
    return i < hidden_.size() && hidden_[i];
}

bool RefEngine::step() {
    if (outcome_) return false;

    if (st_.active) return step_active();
    if (st_.rejected) return step_rejected();

    if (pending_label_) {
        LabelAction a = *pending_label_;
        pending_label_.reset();
        run_label_action(a);
        return true;
    }
    if (step_item()) return true;
    if (step_wake()) return true;

    if (const Item* it = current_item()) {
        // Only a choice construct can still be pending here.
        const auto& ch = std::get<ChoiceItem>(*it);
        advance_cursor();
        enter_choice(ch);
        return true;
    }

    if (st_.all_ground()) {
        if (st_.domains.empty()) {
            // Vacuous success: nothing was ever traced.
            outcome_ = EngineResult::Outcome::Solution;
            return false;
        }
        finish_solution();
        return true;
    }

    open_label_choice();
    return true;
}

bool RefEngine::step_active() {
    ConstraintId cid = *st_.active;
    const ConstraintDef& def = st_.constraints.at(cid);

    if (unsatisfiable(def, st_.domains)) {
        st_.active.reset();
        st_.rejected = cid;
        TraceEvent e;
        e.chrono = em_.tick();
        e.port = Port::Reject;
        e.cid = cid;
        if (em_.wants(Port::Reject)) em_.deliver(std::move(e));
        return true;
    }
    // First variable in argument order with a non-empty withdrawal; the
    // constraint stays active and the scan restarts next step.
    for (VarId x : def.vars) {
        FiniteDomain w = delta(def, x, st_.domains);
        if (!w.empty()) {
            apply_reduce(x, st_.domains.at(x).minus(w), w, cid);
            return true;
        }
    }
    st_.active.reset();
    st_.sleeping.insert(cid);
    st_.change_records.erase(cid);
    TraceEvent e;
    e.chrono = em_.tick();
    e.port = Port::Suspend;
    e.cid = cid;
    if (em_.wants(Port::Suspend)) em_.deliver(std::move(e));
    return true;
}

bool RefEngine::step_rejected() {
    if (choices_.empty()) {
        TraceEvent e;
        e.chrono = em_.tick();
        e.port = Port::Failure;
        if (em_.wants(Port::Failure)) em_.deliver(std::move(e));
        outcome_ = EngineResult::Outcome::Exhausted;
        return true;
    }
    ChoiceSnapshot snap = std::move(choices_.back());
    choices_.pop_back();
    st_ = std::move(snap.state);
    frames_ = std::move(snap.frames);
    slot_vars_ = std::move(snap.slot_vars);
    st_.active.reset();
    st_.rejected.reset();
    if (auto* block = std::get_if<const std::vector<Item>*>(&snap.alt))
        frames_.push_back({*block, 0});
    else
        pending_label_ = std::get<LabelAction>(snap.alt);
    TraceEvent e;
    e.chrono = em_.tick();
    e.port = Port::BackTo;
    e.cpid = snap.cp;
    if (em_.wants(Port::BackTo)) em_.deliver(std::move(e));
    return true;
}

void RefEngine::run_label_action(const LabelAction& a) {
    const FiniteDomain& old_dom = st_.domains.at(a.var);
    FiniteDomain new_dom = a.assign
                               ? FiniteDomain::singleton(a.value)
                               : old_dom.minus(FiniteDomain::singleton(a.value));
    apply_reduce(a.var, new_dom, old_dom.minus(new_dom), kLabelCid);
}

bool RefEngine::step_item() {
    const Item* it = current_item();
    if (!it || std::holds_alternative<ChoiceItem>(*it)) return false;
    advance_cursor();

    if (const auto* decl = std::get_if<VarDeclItem>(it)) {
        VarId vid{++next_var_};
        slot_vars_[static_cast<std::size_t>(decl->slot)] = vid;
        st_.domains[vid] = decl->domain;
        if (hidden_.size() <= static_cast<std::size_t>(vid.ordinal))
            hidden_.resize(static_cast<std::size_t>(vid.ordinal) + 1, false);
        hidden_[static_cast<std::size_t>(vid.ordinal)] = decl->hidden;
        TraceEvent e;
        e.chrono = em_.tick();
        e.port = Port::NewVariable;
        e.vid = vid;
        e.dom = decl->domain;
        if (em_.wants(Port::NewVariable)) em_.deliver(std::move(e));
        return true;
    }

    const auto& post = std::get<PostItem>(*it);
    ConstraintDef def;
    def.id = ConstraintId{++next_con_};
    def.kind = post.kind;
    def.offset = post.offset;
    def.table = post.table;
    for (int slot : post.var_slots) {
        auto v = slot_vars_[static_cast<std::size_t>(slot)];
        assert(v && "constraint references a variable not on this path");
        def.vars.push_back(*v);
    }
    st_.constraints[def.id] = def;
    // The new constraint becomes active right away; no separate event.
    st_.active = def.id;
    TraceEvent e;
    e.chrono = em_.tick();
    e.port = Port::NewConstraint;
    e.cid = def.id;
    e.ctext = def.text();
    if (em_.wants(Port::NewConstraint)) em_.deliver(std::move(e));
    return true;
}

bool RefEngine::step_wake() {
    for (auto it = st_.pending_wake.begin(); it != st_.pending_wake.end();
         ++it) {
        ConstraintId cid = *it;
        auto rec = st_.change_records.find(cid);
        if (rec == st_.change_records.end()) continue;
        if (!wake_condition(st_.constraints.at(cid), rec->second)) continue;
        st_.pending_wake.erase(it);
        st_.change_records.erase(rec);
        st_.sleeping.erase(cid);
        st_.active = cid;
        TraceEvent e;
        e.chrono = em_.tick();
        e.port = Port::Awake;
        e.cid = cid;
        if (em_.wants(Port::Awake)) em_.deliver(std::move(e));
        return true;
    }
    return false;
}

void RefEngine::enter_choice(const ChoiceItem& ch) {
    ChoiceSnapshot snap;
    snap.cp = ++next_cp_;
    snap.state = st_;
    snap.frames = frames_;
    snap.slot_vars = slot_vars_;
    snap.alt = &ch.second;
    choices_.push_back(std::move(snap));
    frames_.push_back({&ch.first, 0});
    TraceEvent e;
    e.chrono = em_.tick();
    e.port = Port::ChoicePoint;
    e.cpid = choices_.back().cp;
    if (em_.wants(Port::ChoicePoint)) em_.deliver(std::move(e));
}

void RefEngine::open_label_choice() {
    std::vector<VarId> ordinals;
    std::vector<std::pair<VarId, std::int64_t>> nonground;
    for (const auto& [v, d] : st_.domains) {
        ordinals.push_back(v);
        if (!d.is_singleton()) nonground.emplace_back(v, d.size());
    }
    assert(!nonground.empty());
    VarId x = pick_variable(nonground, ordinals, strat_.var_order);
    int value = pick_value(st_.domains.at(x), strat_.val_order);

    ChoiceSnapshot snap;
    snap.cp = ++next_cp_;
    snap.state = st_;
    snap.frames = frames_;
    snap.slot_vars = slot_vars_;
    snap.alt = LabelAction{x, value, /*assign=*/false};
    choices_.push_back(std::move(snap));
    pending_label_ = LabelAction{x, value, /*assign=*/true};
    TraceEvent e;
    e.chrono = em_.tick();
    e.port = Port::ChoicePoint;
    e.cpid = choices_.back().cp;
    if (em_.wants(Port::ChoicePoint)) em_.deliver(std::move(e));
}

void RefEngine::finish_solution() {
    Bindings all = solution_bindings();
    outcome_ = EngineResult::Outcome::Solution;
    TraceEvent e;
    e.chrono = em_.tick();
    e.port = Port::Solution;
    e.bindings = all;
    if (em_.wants(Port::Solution)) em_.deliver(std::move(e));
}

Bindings RefEngine::solution_bindings() const {
    Bindings b;
    for (const auto& [v, d] : st_.domains)
        if (!is_hidden(v)) b[v] = d.min();
    return b;
}

void RefEngine::apply_reduce(VarId x, const FiniteDomain& new_dom,
                             const FiniteDomain& withdrawn, ConstraintId by) {
    const FiniteDomain old_dom = st_.domains.at(x);
    std::vector<UpdateKind> mods = classify_update(old_dom, new_dom);
    st_.domains[x] = new_dom;

    KindSet kinds = kind_set(mods);
    for (ConstraintId cid : st_.sleeping) {
        const ConstraintDef& def = st_.constraints.at(cid);
        if (std::find(def.vars.begin(), def.vars.end(), x) == def.vars.end())
            continue;
        st_.change_records[cid].note(x, kinds);
        if (std::find(st_.pending_wake.begin(), st_.pending_wake.end(), cid) ==
            st_.pending_wake.end())
            st_.pending_wake.push_back(cid);
    }

    TraceEvent e;
    e.chrono = em_.tick();
    e.port = Port::Reduce;
    e.cid = by;
    e.vid = x;
    e.dom = new_dom;
    e.wd = withdrawn;
    e.mods = std::move(mods);
    if (em_.wants(Port::Reduce)) em_.deliver(std::move(e));
}

const Item* RefEngine::current_item() {
    while (!frames_.empty() && frames_.back().index >= frames_.back().items->size())
        frames_.pop_back();
    if (frames_.empty()) return nullptr;
    return &(*frames_.back().items)[frames_.back().index];
}

void RefEngine::advance_cursor() { ++frames_.back().index; }

EngineResult RefEngine::result() const {
    assert(outcome_);
    EngineResult r;
    r.outcome = *outcome_;
    if (r.outcome == EngineResult::Outcome::Solution)
        r.bindings = solution_bindings();
    r.event_count = em_.chrono();
    return r;
}

EngineResult solve_ref(const Program& p, Strategy s, Emitter& em) {
    RefEngine engine(p, s, em);
    while (engine.step()) {
    }
    return engine.result();
}

VarId pick_variable(
    const std::vector<std::pair<VarId, std::int64_t>>& nonground_sizes,
    const std::vector<VarId>& ordinals, VarOrder order) {
    assert(!nonground_sizes.empty());
    if (order == VarOrder::FirstFailMin) {
        VarId best = nonground_sizes.front().first;
        std::int64_t best_size = nonground_sizes.front().second;
        for (const auto& [v, sz] : nonground_sizes)
            if (sz < best_size) {
                best = v;
                best_size = sz;
            }
        return best;
    }
    // Middle-out rank over the live variables in creation order; first-fail
    // with ties broken by closeness to the centre.
    std::vector<VarId> sorted = ordinals;
    std::sort(sorted.begin(), sorted.end());
    const double centre = (static_cast<double>(sorted.size()) + 1.0) / 2.0;
    auto rank = [&](VarId v) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
        std::size_t pos = static_cast<std::size_t>(it - sorted.begin()) + 1;
        return std::pair<double, std::size_t>(
            std::abs(static_cast<double>(pos) - centre), pos);
    };
    VarId best = nonground_sizes.front().first;
    std::int64_t best_size = nonground_sizes.front().second;
    auto best_rank = rank(best);
    for (const auto& [v, sz] : nonground_sizes) {
        auto r = rank(v);
        if (sz < best_size || (sz == best_size && r < best_rank)) {
            best = v;
            best_size = sz;
            best_rank = r;
        }
    }
    return best;
}

int pick_value(const FiniteDomain& d, ValOrder order) {
    if (order == ValOrder::MinValue) return d.min();
    // Value at position ceil(size/2) in ascending order.
    std::int64_t target = (d.size() + 1) / 2;
    for (const Interval& iv : d.intervals()) {
        std::int64_t width = static_cast<std::int64_t>(iv.hi) - iv.lo + 1;
        if (target <= width) return iv.lo + static_cast<int>(target - 1);
        target -= width;
    }
    return d.max();  // unreachable for non-empty domains
}

}  // namespace fdt
