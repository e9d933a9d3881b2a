#include "fdt/bench.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "fdt/fast_engine.hpp"
#include "fdt/trace.hpp"

namespace fdt {

const char* to_string(BenchMode m) {
    switch (m) {
        case BenchMode::Off: return "off";
        case BenchMode::NullSink: return "null-sink";
        case BenchMode::FullFile: return "full-file";
    }
    return "?";
}

BenchMode bench_mode_from_string(const std::string& s) {
    if (s == "off") return BenchMode::Off;
    if (s == "null-sink") return BenchMode::NullSink;
    if (s == "full-file") return BenchMode::FullFile;
    throw std::invalid_argument("unknown bench mode: " + s);
}

namespace {

class NullSink : public TraceSink {
public:
    void on_event(const TraceEvent&) override {}
};

double run_once(const Program& p, Strategy s, BenchMode mode,
                const std::filesystem::path& scratch) {
    using clock = std::chrono::steady_clock;
    double ms = 0.0;
    switch (mode) {
        case BenchMode::Off: {
            Emitter em(EmissionConfig::nothing(), nullptr);
            auto t0 = clock::now();
            solve_fast(p, s, em);
            ms = std::chrono::duration<double, std::milli>(clock::now() - t0)
                     .count();
            break;
        }
        case BenchMode::NullSink: {
            NullSink sink;
            Emitter em(EmissionConfig::everything(), &sink);
            auto t0 = clock::now();
            solve_fast(p, s, em);
            ms = std::chrono::duration<double, std::milli>(clock::now() - t0)
                     .count();
            break;
        }
        case BenchMode::FullFile: {
            std::ofstream out(scratch, std::ios::binary);
            StreamSink sink(out, TraceFormat::Canonical);
            Emitter em(EmissionConfig::everything(), &sink);
            auto t0 = clock::now();
            solve_fast(p, s, em);
            out.flush();
            ms = std::chrono::duration<double, std::milli>(clock::now() - t0)
                     .count();
            break;
        }
    }
    return ms;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

}  // namespace

std::vector<BenchReport> run_bench(const Program& p, Strategy s,
                                   const std::vector<BenchMode>& modes,
                                   int repeat) {
    if (repeat < 1) throw std::invalid_argument("bench: repeat must be >= 1");
    std::vector<BenchMode> all = {BenchMode::Off};
    for (BenchMode m : modes)
        if (m != BenchMode::Off) all.push_back(m);

    auto scratch = std::filesystem::temp_directory_path() /
                   ("fdtrace-bench-" + std::to_string(::getpid()) + ".trace");

    std::vector<BenchReport> out;
    double off_ms = 0.0;
    for (BenchMode m : all) {
        run_once(p, s, m, scratch);  // warm-up, untimed
        std::vector<double> times;
        for (int i = 0; i < repeat; ++i)
            times.push_back(run_once(p, s, m, scratch));
        BenchReport report;
        report.mode = m;
        report.wall_ms = median(std::move(times));
        if (m == BenchMode::Off) off_ms = report.wall_ms;
        report.ratio_vs_off = off_ms > 0.0 ? report.wall_ms / off_ms : 1.0;
        out.push_back(report);
    }
    std::error_code ec;
    std::filesystem::remove(scratch, ec);
    return out;
}

}  // namespace fdt
