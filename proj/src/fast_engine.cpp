#include "fdt/fast_engine.hpp"

#include <algorithm>
#include <cassert>

#include "fdt/error.hpp"

namespace fdt {

void Registry::add_variable(const void* handle, VarId id, std::string debug) {
    by_handle_[handle] = Entry{true, id.ordinal, std::move(debug)};
    var_handles_[id.ordinal] = handle;
}

void Registry::add_constraint(const void* handle, ConstraintId id,
                              std::string debug) {
    by_handle_[handle] = Entry{false, id.ordinal, std::move(debug)};
    con_handles_[id.ordinal] = handle;
}

void Registry::remove(const void* handle) {
    auto it = by_handle_.find(handle);
    if (it == by_handle_.end())
        throw NotFoundError("registry: removing unknown handle");
    if (it->second.is_var)
        var_handles_.erase(it->second.ordinal);
    else
        con_handles_.erase(it->second.ordinal);
    by_handle_.erase(it);
}

VarId Registry::variable_id(const void* handle) const {
    auto it = by_handle_.find(handle);
    if (it == by_handle_.end() || !it->second.is_var)
        throw NotFoundError("registry: handle is not a live variable");
    return VarId{it->second.ordinal};
}

ConstraintId Registry::constraint_id(const void* handle) const {
    auto it = by_handle_.find(handle);
    if (it == by_handle_.end() || it->second.is_var)
        throw NotFoundError("registry: handle is not a live constraint");
    return ConstraintId{it->second.ordinal};
}

const void* Registry::handle_of(VarId id) const {
    auto it = var_handles_.find(id.ordinal);
    if (it == var_handles_.end())
        throw NotFoundError("registry: no live variable " + to_string(id));
    return it->second;
}

const void* Registry::handle_of(ConstraintId id) const {
    auto it = con_handles_.find(id.ordinal);
    if (it == con_handles_.end())
        throw NotFoundError("registry: no live constraint " + to_string(id));
    return it->second;
}

const std::string& Registry::debug_info(const void* handle) const {
    auto it = by_handle_.find(handle);
    if (it == by_handle_.end())
        throw NotFoundError("registry: unknown handle");
    return it->second.debug;
}

std::vector<VarId> Registry::variables() const {
    std::vector<VarId> out;
    out.reserve(var_handles_.size());
    for (const auto& [ordinal, handle] : var_handles_)
        out.push_back(VarId{ordinal});
    return out;
}

std::vector<ConstraintId> Registry::constraints() const {
    std::vector<ConstraintId> out;
    out.reserve(con_handles_.size());
    for (const auto& [ordinal, handle] : con_handles_)
        out.push_back(ConstraintId{ordinal});
    return out;
}

bool Registry::bijection_ok() const {
    if (var_handles_.size() + con_handles_.size() != by_handle_.size())
        return false;
    for (const auto& [ordinal, handle] : var_handles_) {
        auto it = by_handle_.find(handle);
        if (it == by_handle_.end() || !it->second.is_var ||
            it->second.ordinal != ordinal)
            return false;
    }
    for (const auto& [ordinal, handle] : con_handles_) {
        auto it = by_handle_.find(handle);
        if (it == by_handle_.end() || it->second.is_var ||
            it->second.ordinal != ordinal)
            return false;
    }
    return true;
}

struct FastEngine::Var {
    VarId id;
    FiniteDomain dom;
    bool hidden = false;
    std::vector<Con*> watchers;
};

struct FastEngine::Con {
    ConstraintId id;
    ConstraintDef def;
    std::vector<Var*> vars;
    bool queued = false;
    bool active = false;
    bool suspended = false;
};

FastEngine::FastEngine(const Program& p, Strategy s, Emitter& em)
    : prog_(p), strat_(s), em_(em) {
    slot_vars_.resize(static_cast<std::size_t>(p.slot_count));
    frames_.push_back({&p.items, 0});
}

FastEngine::~FastEngine() = default;

// Drops attributes the port does not carry; attributes the port does
// carry are overwritten by the fill callback, reusing their storage.
void FastEngine::prepare_scratch(Port p, std::uint64_t chrono) {
    scratch_.chrono = chrono;
    scratch_.port = p;
    const AttrSet keep = required_attrs(p);
    if (!(keep & attr_bit(Attr::Cid))) scratch_.cid.reset();
    if (!(keep & attr_bit(Attr::Vid))) scratch_.vid.reset();
    if (!(keep & attr_bit(Attr::Dom))) scratch_.dom.reset();
    if (!(keep & attr_bit(Attr::Wd))) scratch_.wd.reset();
    if (!(keep & attr_bit(Attr::Mods))) scratch_.mods.reset();
    if (!(keep & attr_bit(Attr::Ctext))) scratch_.ctext.reset();
    if (!(keep & attr_bit(Attr::Bindings))) scratch_.bindings.reset();
    if (!(keep & attr_bit(Attr::Cpid))) scratch_.cpid.reset();
}

template <typename Fill>
void FastEngine::emit_event(Port p, Fill&& fill) {
    const std::uint64_t n = em_.tick();
    if (em_.wants(p)) {
        prepare_scratch(p, n);
        fill(scratch_);
        em_.deliver(scratch_);
    }
    if (audit_) audit_();
}

FastEngine::Var* FastEngine::make_variable(const VarDeclItem& decl) {
    auto owned = std::make_unique<Var>();
    Var* v = owned.get();
    v->id = VarId{++next_var_};
    v->dom = FiniteDomain::full();
    v->hidden = decl.hidden;
    var_storage_.push_back(std::move(owned));
    live_vars_.push_back(v);
    slot_vars_[static_cast<std::size_t>(decl.slot)] = v;
    registry_.add_variable(v, v->id, decl.name);
    trail_.push_back(VarCreated{v, decl.slot});
    return v;
}

FastEngine::Con* FastEngine::make_constraint(const PostItem& post) {
    auto owned = std::make_unique<Con>();
    Con* c = owned.get();
    c->id = ConstraintId{++next_con_};
    c->def.id = c->id;
    c->def.kind = post.kind;
    c->def.offset = post.offset;
    c->def.table = post.table;
    for (int slot : post.var_slots) {
        Var* v = slot_vars_[static_cast<std::size_t>(slot)].value();
        c->vars.push_back(v);
        c->def.vars.push_back(v->id);
    }
    con_storage_.push_back(std::move(owned));
    live_cons_.push_back(c);
    registry_.add_constraint(c, c->id, post.name);
    for (Var* v : c->vars) v->watchers.push_back(c);
    trail_.push_back(ConCreated{c});
    return c;
}

void FastEngine::destroy(const TrailEntry& entry) {
    if (const auto* dc = std::get_if<DomainChange>(&entry)) {
        dc->var->dom = dc->old_dom;
        return;
    }
    if (const auto* vc = std::get_if<VarCreated>(&entry)) {
        registry_.remove(vc->var);
        assert(live_vars_.back() == vc->var);
        live_vars_.pop_back();
        slot_vars_[static_cast<std::size_t>(vc->slot)].reset();
        assert(var_storage_.back().get() == vc->var);
        var_storage_.pop_back();
        return;
    }
    const auto& cc = std::get<ConCreated>(entry);
    registry_.remove(cc.con);
    for (auto it = cc.con->vars.rbegin(); it != cc.con->vars.rend(); ++it) {
        assert((*it)->watchers.back() == cc.con);
        (*it)->watchers.pop_back();
    }
    assert(live_cons_.back() == cc.con);
    live_cons_.pop_back();
    assert(con_storage_.back().get() == cc.con);
    con_storage_.pop_back();
}

void FastEngine::undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
        destroy(trail_.back());
        trail_.pop_back();
    }
}

bool FastEngine::tighten_min(Var* v, int bound, ConstraintId by) {
    FiniteDomain target = v->dom.intersect(FiniteDomain::range(bound, kFullMax));
    if (target == v->dom) return true;
    if (target.empty()) return false;
    commit_reduce(v, std::move(target), by);
    return true;
}

bool FastEngine::tighten_max(Var* v, int bound, ConstraintId by) {
    FiniteDomain target = v->dom.intersect(FiniteDomain::range(0, bound));
    if (target == v->dom) return true;
    if (target.empty()) return false;
    commit_reduce(v, std::move(target), by);
    return true;
}

bool FastEngine::remove_set(Var* v, const FiniteDomain& values,
                            ConstraintId by) {
    FiniteDomain target = v->dom.minus(values);
    if (target == v->dom) return true;
    if (target.empty()) return false;
    commit_reduce(v, std::move(target), by);
    return true;
}

bool FastEngine::assign_value(Var* v, int value, ConstraintId by) {
    if (!v->dom.contains(value)) return false;
    if (v->dom.is_singleton()) return true;
    commit_reduce(v, FiniteDomain::singleton(value), by);
    return true;
}

// Dispatch on the shape of the change, as the initial-domain trim can be
// any of the three cases. A two-sided bounds trim is still one domain
// change and reports one reduce.
bool FastEngine::trim_to(Var* v, const FiniteDomain& target, ConstraintId by) {
    if (target == v->dom) return true;
    if (target.empty()) return false;
    if (target.is_singleton()) return assign_value(v, target.min(), by);
    if (target == v->dom.intersect(
                      FiniteDomain::range(target.min(), target.max()))) {
        commit_reduce(v, target, by);
        return true;
    }
    return remove_set(v, v->dom.minus(target), by);
}

void FastEngine::commit_reduce(Var* v, FiniteDomain new_dom, ConstraintId by) {
    assert(!new_dom.empty() && new_dom != v->dom);
    classify_update_into(v->dom, new_dom, mods_scratch_);
    trail_.push_back(DomainChange{v, std::move(v->dom)});
    const FiniteDomain& old_dom = std::get<DomainChange>(trail_.back()).old_dom;
    v->dom = std::move(new_dom);

    const KindSet kinds = kind_set(mods_scratch_);
    for (Con* w : v->watchers) {
        if (w->queued || w->active || !w->suspended) continue;
        if (wakes(w->def.kind, kinds)) {
            w->queued = true;
            queue_.push_back(w);
        }
    }

    emit_event(Port::Reduce, [&](TraceEvent& e) {
        e.cid = by;
        e.vid = v->id;
        e.dom = v->dom;
        if (!e.wd) e.wd.emplace();
        e.wd->assign_difference(old_dom, *e.dom);
        e.mods = mods_scratch_;
    });
}

bool FastEngine::revise(Con* c) {
    c->active = true;
    c->suspended = false;
    Var* x = c->vars[0];
    Var* y = c->vars[1];
    bool wiped = false;

    switch (c->def.kind) {
        case ConstraintKind::Gt:
            // Bounds reasoning only; one pass reaches the local fixpoint.
            wiped = !tighten_min(x, y->dom.empty() ? 0 : y->dom.min() + 1,
                                 c->id) ||
                    !tighten_max(y, x->dom.empty() ? 0 : x->dom.max() - 1,
                                 c->id);
            break;
        case ConstraintKind::Eq:
            wiped = !remove_set(x, x->dom.minus(y->dom), c->id) ||
                    !remove_set(y, y->dom.minus(x->dom), c->id);
            break;
        case ConstraintKind::NeqOffset: {
            // Each removal can ground the other side, so iterate.
            bool changed = true;
            while (changed && !wiped) {
                changed = false;
                if (y->dom.is_singleton()) {
                    int forbidden = y->dom.min() + c->def.offset;
                    if (x->dom.contains(forbidden)) {
                        if (x->dom.is_singleton()) {
                            wiped = true;
                            break;
                        }
                        remove_set(x, FiniteDomain::singleton(forbidden),
                                   c->id);
                        changed = true;
                    }
                }
                if (x->dom.is_singleton()) {
                    int forbidden = x->dom.min() - c->def.offset;
                    if (y->dom.contains(forbidden)) {
                        if (y->dom.is_singleton()) {
                            wiped = true;
                            break;
                        }
                        remove_set(y, FiniteDomain::singleton(forbidden),
                                   c->id);
                        changed = true;
                    }
                }
            }
            break;
        }
        case ConstraintKind::Element: {
            bool changed = true;
            while (changed && !wiped) {
                changed = false;
                std::vector<int> good_idx;
                for (std::size_t j = 0; j < c->def.table.size(); ++j)
                    if (y->dom.contains(c->def.table[j]))
                        good_idx.push_back(static_cast<int>(j) + 1);
                FiniteDomain ti =
                    x->dom.intersect(FiniteDomain::from_values(good_idx));
                if (ti != x->dom) {
                    if (ti.empty()) {
                        wiped = true;
                        break;
                    }
                    remove_set(x, x->dom.minus(ti), c->id);
                    changed = true;
                }
                std::vector<int> good_val;
                for (std::size_t j = 0; j < c->def.table.size(); ++j)
                    if (x->dom.contains(static_cast<int>(j) + 1))
                        good_val.push_back(c->def.table[j]);
                FiniteDomain tv =
                    y->dom.intersect(FiniteDomain::from_values(good_val));
                if (tv != y->dom) {
                    if (tv.empty()) {
                        wiped = true;
                        break;
                    }
                    remove_set(y, y->dom.minus(tv), c->id);
                    changed = true;
                }
            }
            break;
        }
    }

    c->active = false;
    if (wiped) {
        // After the coming backtrack the constraint counts as suspended
        // again; the flag must not stay cleared.
        c->suspended = true;
        emit_event(Port::Reject, [&](TraceEvent& e) { e.cid = c->id; });
        return false;
    }
    c->suspended = true;
    emit_event(Port::Suspend, [&](TraceEvent& e) { e.cid = c->id; });
    return true;
}

bool FastEngine::drain_queue() {
    while (queue_head_ < queue_.size()) {
        Con* c = queue_[queue_head_++];
        c->queued = false;
        emit_event(Port::Awake, [&](TraceEvent& e) { e.cid = c->id; });
        if (!revise(c)) return false;
    }
    queue_.clear();
    queue_head_ = 0;
    return true;
}

bool FastEngine::fail_branch() {
    for (std::size_t i = queue_head_; i < queue_.size(); ++i)
        queue_[i]->queued = false;
    queue_.clear();
    queue_head_ = 0;

    if (choices_.empty()) {
        emit_event(Port::Failure, [](TraceEvent&) {});
        outcome_ = EngineResult::Outcome::Exhausted;
        return false;
    }
    ChoiceMark mark = std::move(choices_.back());
    choices_.pop_back();
    undo_to(mark.trail_mark);
    frames_ = std::move(mark.frames);
    emit_event(Port::BackTo, [&](TraceEvent& e) { e.cpid = mark.cp; });
    if (auto* block = std::get_if<const std::vector<Item>*>(&mark.alt))
        frames_.push_back({*block, 0});
    else
        pending_label_ = std::get<LabelAction>(mark.alt);
    return true;
}

bool FastEngine::all_ground() const {
    for (const Var* v : live_vars_)
        if (!v->dom.is_singleton()) return false;
    return true;
}

bool FastEngine::run_items() {
    // Drives items and propagation until quiescence with all items done
    // (true) or exhaustion (false). Branch failures backtrack in place.
    while (true) {
        if (pending_label_) {
            LabelAction a = *pending_label_;
            pending_label_.reset();
            bool ok = a.assign ? assign_value(a.var, a.value, kLabelCid)
                               : remove_set(a.var,
                                            FiniteDomain::singleton(a.value),
                                            kLabelCid);
            assert(ok);  // the labeled variable always contains the value
            (void)ok;
            if (!drain_queue() && !fail_branch()) return false;
            continue;
        }
        while (!frames_.empty() &&
               frames_.back().index >= frames_.back().items->size())
            frames_.pop_back();
        if (frames_.empty()) {
            assert(queue_head_ >= queue_.size());
            return true;
        }

        const Item& item = (*frames_.back().items)[frames_.back().index++];
        if (const auto* decl = std::get_if<VarDeclItem>(&item)) {
            Var* v = make_variable(*decl);
            emit_event(Port::NewVariable, [&](TraceEvent& e) {
                e.vid = v->id;
                e.dom = v->dom;
            });
            // Gnu-Prolog style: created full, trimmed to the declared
            // domain through the regular reduction machinery.
            bool ok = trim_to(v, decl->domain, kLabelCid);
            assert(ok);
            (void)ok;
            if (!drain_queue() && !fail_branch()) return false;
        } else if (const auto* post = std::get_if<PostItem>(&item)) {
            Con* c = make_constraint(*post);
            emit_event(Port::NewConstraint, [&](TraceEvent& e) {
                e.cid = c->id;
                e.ctext = c->def.text();
            });
            if ((!revise(c) || !drain_queue()) && !fail_branch()) return false;
        } else {
            const auto& choice = std::get<ChoiceItem>(item);
            ChoiceMark mark;
            mark.cp = ++next_cp_;
            mark.trail_mark = trail_.size();
            mark.frames = frames_;
            mark.alt = &choice.second;
            choices_.push_back(std::move(mark));
            frames_.push_back({&choice.first, 0});
            emit_event(Port::ChoicePoint,
                       [&](TraceEvent& e) { e.cpid = choices_.back().cp; });
        }
    }
}

EngineResult FastEngine::run() {
    while (!outcome_) {
        if (!run_items()) break;  // exhausted; failure already emitted
        if (all_ground()) {
            if (live_vars_.empty()) {
                outcome_ = EngineResult::Outcome::Solution;
                break;
            }
            emit_event(Port::Solution, [&](TraceEvent& e) {
                e.bindings = current_bindings();
            });
            outcome_ = EngineResult::Outcome::Solution;
            break;
        }
        // Labeling decision at the propagation fixpoint.
        std::vector<VarId> ordinals;
        std::vector<std::pair<VarId, std::int64_t>> nonground;
        for (const Var* v : live_vars_) {
            ordinals.push_back(v->id);
            if (!v->dom.is_singleton())
                nonground.emplace_back(v->id, v->dom.size());
        }
        VarId picked = pick_variable(nonground, ordinals, strat_.var_order);
        Var* var = nullptr;
        for (Var* v : live_vars_)
            if (v->id == picked) var = v;
        int value = pick_value(var->dom, strat_.val_order);

        ChoiceMark mark;
        mark.cp = ++next_cp_;
        mark.trail_mark = trail_.size();
        mark.frames = frames_;
        mark.alt = LabelAction{var, value, false};
        choices_.push_back(std::move(mark));
        pending_label_ = LabelAction{var, value, true};
        emit_event(Port::ChoicePoint,
                   [&](TraceEvent& e) { e.cpid = choices_.back().cp; });
    }

    EngineResult r;
    r.outcome = *outcome_;
    if (r.outcome == EngineResult::Outcome::Solution)
        r.bindings = current_bindings();
    r.event_count = em_.chrono();
    return r;
}

DomainMap FastEngine::live_domains() const {
    DomainMap out;
    for (const Var* v : live_vars_) out[v->id] = v->dom;
    return out;
}

std::vector<std::pair<ConstraintId, std::string>> FastEngine::live_constraints()
    const {
    std::vector<std::pair<ConstraintId, std::string>> out;
    for (const Con* c : live_cons_) out.emplace_back(c->id, c->def.text());
    std::sort(out.begin(), out.end());
    return out;
}

Bindings FastEngine::current_bindings() const {
    Bindings b;
    for (const Var* v : live_vars_)
        if (!v->hidden && v->dom.is_singleton()) b[v->id] = v->dom.min();
    return b;
}

EngineResult solve_fast(const Program& p, Strategy s, Emitter& em) {
    FastEngine engine(p, s, em);
    return engine.run();
}

}  // namespace fdt
