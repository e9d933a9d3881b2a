#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "fdt/program.hpp"
#include "fdt/ref_engine.hpp"
#include "fdt/trace.hpp"

namespace fdt {

// Tracer-side identifier table (the solver core only handles pointers).
// Keeps the bijection between live entity handles and ordinal ids; both
// lookup directions are logarithmic and live entities can be enumerated
// in id order.
class Registry {
public:
    void add_variable(const void* handle, VarId id, std::string debug);
    void add_constraint(const void* handle, ConstraintId id,
                        std::string debug);
    void remove(const void* handle);

    VarId variable_id(const void* handle) const;
    ConstraintId constraint_id(const void* handle) const;
    const void* handle_of(VarId id) const;
    const void* handle_of(ConstraintId id) const;
    const std::string& debug_info(const void* handle) const;

    std::vector<VarId> variables() const;
    std::vector<ConstraintId> constraints() const;

    // Debug audit: inverse maps exactly mirror the forward map.
    bool bijection_ok() const;

private:
    struct Entry {
        bool is_var;
        int ordinal;
        std::string debug;
    };
    std::map<const void*, Entry> by_handle_;
    std::map<int, const void*> var_handles_;
    std::map<int, const void*> con_handles_;
};

// Propagation-queue engine with trail-based backtracking. Emits the same
// observable trace model as RefEngine; event order between search events
// may differ (queue order instead of rule-policy order).
class FastEngine {
public:
    FastEngine(const Program& p, Strategy s, Emitter& em);
    ~FastEngine();

    EngineResult run();

    const Registry& registry() const { return registry_; }
    DomainMap live_domains() const;
    std::vector<std::pair<ConstraintId, std::string>> live_constraints() const;
    Bindings current_bindings() const;

    // Invoked after every event (suppressed ones included); test hook.
    void set_event_audit(std::function<void()> fn) { audit_ = std::move(fn); }

private:
    struct Var;
    struct Con;

    struct DomainChange {
        Var* var;
        FiniteDomain old_dom;
    };
    struct VarCreated {
        Var* var;
        int slot;
    };
    struct ConCreated {
        Con* con;
    };
    using TrailEntry = std::variant<DomainChange, VarCreated, ConCreated>;

    struct LabelAction {
        Var* var;
        int value;
        bool assign;
    };
    struct FrameRef {
        const std::vector<Item>* items;
        std::size_t index;
    };
    using AltEntry = std::variant<const std::vector<Item>*, LabelAction>;
    struct ChoiceMark {
        int cp;
        std::size_t trail_mark;
        std::vector<FrameRef> frames;
        AltEntry alt;
    };

    Var* make_variable(const VarDeclItem& decl);
    Con* make_constraint(const PostItem& post);
    void destroy(const TrailEntry& entry);
    void undo_to(std::size_t mark);

    // Specialized reduction paths; each reports one unified reduce event.
    // All return false when the change would wipe the domain (nothing is
    // applied in that case).
    bool tighten_min(Var* v, int bound, ConstraintId by);
    bool tighten_max(Var* v, int bound, ConstraintId by);
    bool remove_set(Var* v, const FiniteDomain& values, ConstraintId by);
    bool assign_value(Var* v, int value, ConstraintId by);
    bool trim_to(Var* v, const FiniteDomain& target, ConstraintId by);
    void commit_reduce(Var* v, FiniteDomain new_dom, ConstraintId by);

    bool revise(Con* c);  // active propagation; false on reject
    bool drain_queue();
    bool fail_branch();   // reject already emitted; false when exhausted
    bool run_items();
    bool all_ground() const;

    template <typename Fill>
    void emit_event(Port p, Fill&& fill);
    void prepare_scratch(Port p, std::uint64_t chrono);

    const Program& prog_;
    Strategy strat_;
    Emitter& em_;
    Registry registry_;
    TraceEvent scratch_;  // reused across events to keep emission cheap
    std::vector<UpdateKind> mods_scratch_;

    std::vector<std::unique_ptr<Var>> var_storage_;
    std::vector<std::unique_ptr<Con>> con_storage_;
    std::vector<Var*> live_vars_;  // creation order
    std::vector<Con*> live_cons_;
    std::vector<std::optional<Var*>> slot_vars_;

    std::vector<TrailEntry> trail_;
    std::vector<ChoiceMark> choices_;
    std::vector<Con*> queue_;
    std::size_t queue_head_ = 0;
    std::vector<FrameRef> frames_;
    std::optional<LabelAction> pending_label_;

    int next_var_ = 0;
    int next_con_ = 0;
    int next_cp_ = 0;

    std::optional<EngineResult::Outcome> outcome_;
    std::function<void()> audit_;
};

EngineResult solve_fast(const Program& p, Strategy s, Emitter& em);

}  // namespace fdt
