#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdt/trace.hpp"

namespace fdt {

// Aggregated update kind of a variable since the previous sample. Most
// informative wins: empty > ground > min > max > any > none.
enum class SceneKind { None, Min, Max, Ground, Any, Empty };

const char* to_string(SceneKind k);

struct SceneRow {
    int step = 0;        // sample ordinal, from 1
    int var = 0;         // variable ordinal
    std::int64_t size = 0;
    SceneKind kind = SceneKind::None;

    bool operator==(const SceneRow&) const = default;
};

// One sample (a row per live variable) at every newConstraint, reject and
// solution event; sizes are the replayed post-event domain cardinalities,
// kinds aggregate the mods of reduce events since the previous sample.
std::vector<SceneRow> sample(const ParsedTrace& trace);

// CSV table "step,var,size,kind", sorted by (step, var).
std::string scene_csv(const std::vector<SceneRow>& rows);

// Plain text 3D scene: one box per row, height = domain size, placed at
// (var, step), color keyed by kind.
std::string scene_3d(const std::vector<SceneRow>& rows);

void write_scene_csv(const std::vector<SceneRow>& rows,
                     const std::string& path);
void write_scene_3d(const std::vector<SceneRow>& rows,
                    const std::string& path);

}  // namespace fdt
