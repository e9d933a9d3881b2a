#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "fdt/program.hpp"
#include "fdt/state.hpp"
#include "fdt/trace.hpp"

namespace fdt {

struct EngineResult {
    enum class Outcome { Solution, Exhausted };
    Outcome outcome = Outcome::Exhausted;
    Bindings bindings;  // user-declared variables only
    std::uint64_t event_count = 0;
};

// The reference tracer: executes the abstract semantics one rule per
// step, each step emitting exactly one event. Choice points snapshot the
// whole state; speed is a non-goal.
class RefEngine {
public:
    RefEngine(const Program& p, Strategy s, Emitter& em);

    // Applies one rule and emits its event; returns false once terminal.
    bool step();

    bool terminal() const { return outcome_.has_value(); }
    EngineResult result() const;

    const SolverState& state() const { return st_; }
    bool is_hidden(VarId v) const;

private:
    struct LabelAction {
        VarId var;
        int value = 0;
        bool assign = true;
    };
    struct FrameRef {
        const std::vector<Item>* items;
        std::size_t index;
    };
    using AltEntry = std::variant<const std::vector<Item>*, LabelAction>;
    struct ChoiceSnapshot {
        int cp;
        SolverState state;
        std::vector<FrameRef> frames;
        std::vector<std::optional<VarId>> slot_vars;
        AltEntry alt;
    };

    bool step_active();
    bool step_rejected();
    void run_label_action(const LabelAction& a);
    bool step_item();
    bool step_wake();
    void enter_choice(const ChoiceItem& ch);
    void open_label_choice();
    void finish_solution();
    void apply_reduce(VarId x, const FiniteDomain& new_dom,
                      const FiniteDomain& withdrawn, ConstraintId by);
    const Item* current_item();
    void advance_cursor();
    Bindings solution_bindings() const;

    const Program& prog_;
    Strategy strat_;
    Emitter& em_;

    SolverState st_;
    std::vector<FrameRef> frames_;
    std::vector<std::optional<VarId>> slot_vars_;
    std::vector<ChoiceSnapshot> choices_;
    std::optional<LabelAction> pending_label_;
    std::vector<bool> hidden_;  // by var ordinal, never shrunk

    int next_var_ = 0;  // monotonic; not part of snapshots
    int next_con_ = 0;
    int next_cp_ = 0;

    std::optional<EngineResult::Outcome> outcome_;
};

EngineResult solve_ref(const Program& p, Strategy s, Emitter& em);

// Strategy helpers shared by both engines. `ordinals` lists the live
// variables in creation order.
VarId pick_variable(const std::vector<std::pair<VarId, std::int64_t>>&
                        nonground_sizes,
                    const std::vector<VarId>& ordinals, VarOrder order);
int pick_value(const FiniteDomain& d, ValOrder order);

}  // namespace fdt
