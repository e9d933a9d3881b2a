#pragma once

#include <string>
#include <vector>

#include "fdt/program.hpp"

namespace fdt {

// Tracing-overhead measurement modes. Hooks are compiled in permanently;
// "off" measures the engine with an empty port set (the per-event cost is
// one branch plus the chrono tick), "null-sink" delivers every event to a
// sink that discards it, "full-file" writes a complete canonical trace.
enum class BenchMode { Off, NullSink, FullFile };

const char* to_string(BenchMode m);
BenchMode bench_mode_from_string(const std::string& s);  // throws

struct BenchReport {
    BenchMode mode = BenchMode::Off;
    double wall_ms = 0.0;     // median over repeats
    double ratio_vs_off = 1.0;
};

// Solves p with the fast engine once per repeat and mode; reports median
// wall time per mode and the ratio against the "off" baseline. "off" is
// measured (and listed first) even when not requested so ratios are
// always well-defined.
std::vector<BenchReport> run_bench(const Program& p, Strategy s,
                                   const std::vector<BenchMode>& modes,
                                   int repeat);

}  // namespace fdt
