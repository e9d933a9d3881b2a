#include "fdt/viz.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "fdt/error.hpp"
#include "fdt/validate.hpp"

namespace fdt {

const char* to_string(SceneKind k) {
    switch (k) {
        case SceneKind::None: return "none";
        case SceneKind::Min: return "min";
        case SceneKind::Max: return "max";
        case SceneKind::Ground: return "ground";
        case SceneKind::Any: return "any";
        case SceneKind::Empty: return "empty";
    }
    return "?";
}

namespace {

int priority(SceneKind k) {
    switch (k) {
        case SceneKind::Empty: return 5;
        case SceneKind::Ground: return 4;
        case SceneKind::Min: return 3;
        case SceneKind::Max: return 2;
        case SceneKind::Any: return 1;
        case SceneKind::None: return 0;
    }
    return 0;
}

SceneKind from_update(UpdateKind k) {
    switch (k) {
        case UpdateKind::Min: return SceneKind::Min;
        case UpdateKind::Max: return SceneKind::Max;
        case UpdateKind::Ground: return SceneKind::Ground;
        case UpdateKind::Any: return SceneKind::Any;
        case UpdateKind::Empty: return SceneKind::Empty;
    }
    return SceneKind::None;
}

}  // namespace

std::vector<SceneRow> sample(const ParsedTrace& trace) {
    std::vector<SceneRow> rows;
    DomainReplayer replay;
    std::map<int, SceneKind> pending;  // per variable, since last sample
    int step = 0;
    for (const TraceEvent& e : trace.events) {
        replay.apply(e);
        if (e.port == Port::Reduce && e.vid && e.mods) {
            SceneKind& agg = pending[e.vid->ordinal];
            for (UpdateKind k : *e.mods) {
                SceneKind sk = from_update(k);
                if (priority(sk) > priority(agg)) agg = sk;
            }
        }
        if (e.port == Port::NewConstraint || e.port == Port::Reject ||
            e.port == Port::Solution) {
            ++step;
            for (const auto& [v, dom] : replay.domains()) {
                SceneRow row;
                row.step = step;
                row.var = v.ordinal;
                row.size = dom.size();
                auto it = pending.find(v.ordinal);
                row.kind = it == pending.end() ? SceneKind::None : it->second;
                rows.push_back(row);
            }
            pending.clear();
        }
    }
    return rows;
}

std::string scene_csv(const std::vector<SceneRow>& rows) {
    std::vector<SceneRow> sorted = rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const SceneRow& a, const SceneRow& b) {
                  return std::pair(a.step, a.var) < std::pair(b.step, b.var);
              });
    std::string out = "step,var,size,kind\n";
    for (const SceneRow& r : sorted) {
        out += std::to_string(r.step) + "," + std::to_string(r.var) + "," +
               std::to_string(r.size) + "," + to_string(r.kind) + "\n";
    }
    return out;
}

std::string scene_3d(const std::vector<SceneRow>& rows) {
    // One axis per variable, one per sample step, box height = domain
    // size. Colors index the kind table below.
    std::string out = "scene fdtrace-boxes 1\n";
    out += "# box <x=var> <y=step> <height=size> <color=kind>\n";
    for (const SceneRow& r : rows) {
        out += "box " + std::to_string(r.var) + " " + std::to_string(r.step) +
               " " + std::to_string(r.size) + " " + to_string(r.kind) + "\n";
    }
    return out;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TraceError("cannot open output file: " + path);
    out << content;
    if (!out) throw TraceError("write failed: " + path);
}

}  // namespace

void write_scene_csv(const std::vector<SceneRow>& rows,
                     const std::string& path) {
    write_file(path, scene_csv(rows));
}

void write_scene_3d(const std::vector<SceneRow>& rows,
                    const std::string& path) {
    write_file(path, scene_3d(rows));
}

}  // namespace fdt
