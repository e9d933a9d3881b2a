// Command-line front end: run programs under either tracer, query traces
// live or post-mortem, validate and diff traces, export scene tables, and
// measure tracing overhead.
//
// Exit codes: 0 success/solution, 1 exhausted, 2 usage or parse error,
// 3 validation failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fdt/bench.hpp"
#include "fdt/error.hpp"
#include "fdt/fast_engine.hpp"
#include "fdt/program.hpp"
#include "fdt/query.hpp"
#include "fdt/ref_engine.hpp"
#include "fdt/trace.hpp"
#include "fdt/validate.hpp"
#include "fdt/viz.hpp"

namespace {

constexpr int kExitSolution = 0;
constexpr int kExitExhausted = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fdt::TraceError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fdt::Strategy parse_strategy_flag(const std::string& flag) {
    auto comma = flag.find(',');
    if (comma == std::string::npos)
        throw fdt::QueryError(
            "--strategy wants <varOrder>,<valOrder>, e.g. "
            "firstFailMin,minValue");
    auto vo = fdt::var_order_from_string(flag.substr(0, comma));
    auto va = fdt::val_order_from_string(flag.substr(comma + 1));
    if (!vo || !va)
        throw fdt::QueryError("unknown strategy: " + flag);
    return fdt::Strategy{*vo, *va};
}

fdt::Strategy effective_strategy(const fdt::Program& p,
                                 const std::string& flag) {
    if (!flag.empty()) return parse_strategy_flag(flag);
    return p.labeling.value_or(fdt::Strategy{});
}

fdt::EmissionConfig build_config(const std::string& ports,
                                 const std::string& attrs) {
    fdt::EmissionConfig cfg;
    if (!ports.empty()) {
        cfg.ports = 0;
        std::stringstream ss{ports};
        std::string name;
        while (std::getline(ss, name, ',')) {
            auto p = fdt::port_from_string(name);
            if (!p) throw fdt::QueryError("unknown port: " + name);
            cfg.enable(*p, true);
        }
    }
    if (!attrs.empty()) {
        fdt::AttrSet keep = 0;
        std::stringstream ss{attrs};
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (name == "cid") keep |= fdt::attr_bit(fdt::Attr::Cid);
            else if (name == "vid") keep |= fdt::attr_bit(fdt::Attr::Vid);
            else if (name == "dom") keep |= fdt::attr_bit(fdt::Attr::Dom);
            else if (name == "wd") keep |= fdt::attr_bit(fdt::Attr::Wd);
            else if (name == "mods") keep |= fdt::attr_bit(fdt::Attr::Mods);
            else if (name == "ctext") keep |= fdt::attr_bit(fdt::Attr::Ctext);
            else if (name == "bindings")
                keep |= fdt::attr_bit(fdt::Attr::Bindings);
            else if (name == "cpid") keep |= fdt::attr_bit(fdt::Attr::Cpid);
            else
                throw fdt::QueryError("unknown attribute: " + name);
        }
        cfg.attrs.fill(keep);
    }
    return cfg;
}

int cmd_run(const std::string& file, const std::string& engine,
            const std::string& trace_path, const std::string& format,
            const std::string& ports, const std::string& attrs,
            const std::string& strategy) {
    fdt::Program p = fdt::parse_program(read_file(file));
    fdt::Strategy s = effective_strategy(p, strategy);
    fdt::EmissionConfig cfg = build_config(ports, attrs);
    fdt::TraceFormat fmt = format == "human" ? fdt::TraceFormat::Human
                                             : fdt::TraceFormat::Canonical;

    std::ofstream file_out;
    std::ostream* out = &std::cout;
    if (!trace_path.empty()) {
        file_out.open(trace_path, std::ios::binary);
        if (!file_out)
            throw fdt::TraceError("cannot open trace file: " + trace_path);
        out = &file_out;
    }
    fdt::StreamSink sink(*out, fmt);
    fdt::Emitter em(cfg, &sink);
    fdt::EngineResult result = engine == "ref" ? fdt::solve_ref(p, s, em)
                                               : fdt::solve_fast(p, s, em);

    if (result.outcome == fdt::EngineResult::Outcome::Solution) {
        std::cerr << "solution:";
        for (const auto& [v, value] : result.bindings)
            std::cerr << " " << fdt::to_string(v) << "=" << value;
        std::cerr << " (" << result.event_count << " events)\n";
        return kExitSolution;
    }
    std::cerr << "exhausted (" << result.event_count << " events)\n";
    return kExitExhausted;
}

int cmd_query(const std::string& trace_path, const std::string& live_file,
              const std::string& engine, const std::string& strategy,
              const std::string& filter_expr, const std::string& attrs,
              const std::string& count_until_expr) {
    std::unique_ptr<fdt::QuerySession> session;
    fdt::Program program;  // must outlive a live session
    if (!live_file.empty()) {
        program = fdt::parse_program(read_file(live_file));
        session = std::make_unique<fdt::LiveSession>(
            program, effective_strategy(program, strategy),
            engine == "ref" ? fdt::EngineKind::Ref : fdt::EngineKind::Fast);
    } else {
        session =
            std::make_unique<fdt::StoredSession>(fdt::load_trace(trace_path));
    }

    if (!count_until_expr.empty()) {
        auto colon = count_until_expr.find(':');
        if (colon == std::string::npos)
            throw fdt::QueryError("--count-until wants COUNT:STOP port lists");
        auto parse_ports = [](const std::string& s) {
            std::vector<fdt::Port> out;
            std::stringstream ss{s};
            std::string name;
            while (std::getline(ss, name, ',')) {
                auto p = fdt::port_from_string(name);
                if (!p) throw fdt::QueryError("unknown port: " + name);
                out.push_back(*p);
            }
            return out;
        };
        auto result = fdt::count_until(
            *session, parse_ports(count_until_expr.substr(0, colon)),
            parse_ports(count_until_expr.substr(colon + 1)));
        std::cout << "count=" << result.count << " stop=";
        if (result.stop)
            std::cout << "chrono=" << result.stop->chrono
                      << " port=" << fdt::to_string(result.stop->port);
        else
            std::cout << "end-of-trace";
        std::cout << "\n";
        return kExitSolution;
    }

    fdt::Filter filter = fdt::Filter::parse(filter_expr);
    std::vector<std::string> attr_names;
    if (!attrs.empty()) {
        std::stringstream ss{attrs};
        std::string name;
        while (std::getline(ss, name, ',')) attr_names.push_back(name);
    }
    while (auto e = session->fget(filter)) {
        if (attr_names.empty()) {
            std::cout << fdt::render_canonical(*e) << "\n";
        } else {
            auto values = session->get_attr(attr_names);
            bool first = true;
            for (const std::string& name : attr_names) {
                if (!first) std::cout << ' ';
                first = false;
                std::cout << name << "=" << values.at(name);
            }
            std::cout << "\n";
        }
    }
    return kExitSolution;
}

int cmd_check(const std::string& trace_path) {
    fdt::ParsedTrace trace = fdt::load_trace(trace_path);
    auto violations = fdt::replay_check(trace);
    for (const fdt::Violation& v : violations)
        std::cout << v.render() << "\n";
    if (violations.empty()) {
        std::cout << "ok: " << trace.events.size() << " events replayed"
                  << (trace.truncated ? " (prefix)" : "") << "\n";
        return kExitSolution;
    }
    return kExitValidation;
}

int cmd_diff(const std::string& left_path, const std::string& right_path,
             const std::string& name_map_path) {
    fdt::ParsedTrace left = fdt::load_trace(left_path);
    fdt::ParsedTrace right = fdt::load_trace(right_path);
    fdt::NameMap names;
    if (!name_map_path.empty()) names = fdt::load_name_map(name_map_path);

    if (left.truncated || right.truncated) {
        // Golden-prefix mode: the truncated side is the reference.
        const fdt::ParsedTrace& golden = left.truncated ? left : right;
        const fdt::ParsedTrace& full = left.truncated ? right : left;
        fdt::PrefixDiff diff = fdt::diff_prefix(golden, full, names);
        if (diff.matches) {
            std::cout << "equivalent (prefix of " << golden.events.size()
                      << " events)\n";
            return kExitSolution;
        }
        std::cout << "divergent: " << diff.divergence << "\n";
        return kExitValidation;
    }

    fdt::AlignmentReport report = fdt::align(left, right);
    if (!report.equivalent) {
        std::cout << "divergent: " << report.divergence << "\n";
        return kExitValidation;
    }
    std::cout << "equivalent\n";
    for (const auto& [right_ord, left_ord] : report.var_map)
        std::cout << "  var v" << right_ord << " -> v" << left_ord << "\n";
    for (const auto& [left_ord, rights] : report.con_map) {
        std::cout << "  con c" << left_ord << " ->";
        for (int r : rights) std::cout << " c" << r;
        std::cout << "\n";
    }
    return kExitSolution;
}

int cmd_viz(const std::string& trace_path, const std::string& out_path,
            const std::string& scene_path) {
    fdt::ParsedTrace trace = fdt::load_trace(trace_path);
    auto violations = fdt::replay_check(trace);
    if (!violations.empty()) {
        std::cerr << "trace fails validation: " << violations.front().render()
                  << "\n";
        return kExitValidation;
    }
    auto rows = fdt::sample(trace);
    fdt::write_scene_csv(rows, out_path);
    if (!scene_path.empty()) fdt::write_scene_3d(rows, scene_path);
    std::cout << rows.size() << " rows\n";
    return kExitSolution;
}

int cmd_bench(const std::string& file, const std::string& modes_flag,
              int repeat, const std::string& strategy) {
    fdt::Program p = fdt::parse_program(read_file(file));
    fdt::Strategy s = effective_strategy(p, strategy);
    std::vector<fdt::BenchMode> modes;
    std::stringstream ss{modes_flag};
    std::string name;
    while (std::getline(ss, name, ','))
        modes.push_back(fdt::bench_mode_from_string(name));
    auto reports = fdt::run_bench(p, s, modes, repeat);
    for (const auto& r : reports) {
        char line[128];
        std::snprintf(line, sizeof line, "%-9s %10.3f %8.2f",
                      fdt::to_string(r.mode), r.wall_ms, r.ratio_vs_off);
        std::cout << line << "\n";
    }
    return kExitSolution;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-domain solver tracing workbench"};
    app.require_subcommand(1);

    std::string file, engine = "fast", trace_path, format = "canonical";
    std::string ports, attrs, strategy;
    auto* run = app.add_subcommand("run", "solve a problem file and trace it");
    run->add_option("file", file, "problem file")->required();
    run->add_option("--engine", engine, "ref|fast")
        ->check(CLI::IsMember({"ref", "fast"}));
    run->add_option("--trace", trace_path, "write the trace to this file");
    run->add_option("--format", format, "human|canonical")
        ->check(CLI::IsMember({"human", "canonical"}));
    run->add_option("--ports", ports, "comma list of ports to emit");
    run->add_option("--attrs", attrs, "comma list of attributes to keep");
    run->add_option("--strategy", strategy, "varOrder,valOrder override");

    std::string q_trace, q_live, q_filter, q_attrs, q_count;
    std::string q_engine = "fast", q_strategy;
    auto* query = app.add_subcommand("query", "search a trace forward");
    query->add_option("trace", q_trace, "stored canonical trace");
    query->add_option("--live", q_live, "run this problem file live");
    query->add_option("--engine", q_engine, "ref|fast (live runs)")
        ->check(CLI::IsMember({"ref", "fast"}));
    query->add_option("--strategy", q_strategy, "strategy (live runs)");
    query->add_option("--filter", q_filter,
                      "e.g. \"port=reduce,chrono>3\" or "
                      "\"port in (reject,solution)\"");
    query->add_option("--attrs", q_attrs, "attributes to print per match");
    query->add_option("--count-until", q_count,
                      "COUNT:STOP port lists, e.g. reject:solution");

    std::string c_trace;
    auto* check = app.add_subcommand("check", "replay a trace against the "
                                              "transition rules");
    check->add_option("trace", c_trace, "canonical trace")->required();

    std::string d_left, d_right, d_names;
    auto* diff = app.add_subcommand("diff", "align two traces");
    diff->add_option("left", d_left, "reference trace")->required();
    diff->add_option("right", d_right, "other trace")->required();
    diff->add_option("--name-map", d_names,
                     "kind-name translation for golden traces");

    std::string v_trace, v_out, v_scene;
    auto* viz = app.add_subcommand("viz", "export the variable-update view");
    viz->add_option("trace", v_trace, "canonical trace")->required();
    viz->add_option("--out", v_out, "CSV output path")->required();
    viz->add_option("--scene", v_scene, "also write a 3D text scene");

    std::string b_file, b_modes = "off,null-sink,full-file", b_strategy;
    int b_repeat = 5;
    auto* bench = app.add_subcommand("bench", "measure tracing overhead");
    bench->add_option("file", b_file, "problem file")->required();
    bench->add_option("--modes", b_modes, "off,null-sink,full-file");
    bench->add_option("--repeat", b_repeat, "repetitions per mode")
        ->check(CLI::PositiveNumber);
    bench->add_option("--strategy", b_strategy, "strategy override");

    int g_n = 0;
    std::string g_strategy;
    auto* gen = app.add_subcommand("gen-queens", "emit an n-queens program");
    gen->add_option("n", g_n, "board size")->required();
    gen->add_option("--strategy", g_strategy, "labeling strategy");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(file, engine, trace_path, format, ports, attrs,
                           strategy);
        if (query->parsed()) {
            if (q_trace.empty() == q_live.empty()) {
                std::cerr << "query wants either a trace file or --live\n";
                return kExitUsage;
            }
            return cmd_query(q_trace, q_live, q_engine, q_strategy, q_filter,
                             q_attrs, q_count);
        }
        if (check->parsed()) return cmd_check(c_trace);
        if (diff->parsed()) return cmd_diff(d_left, d_right, d_names);
        if (viz->parsed()) return cmd_viz(v_trace, v_out, v_scene);
        if (bench->parsed())
            return cmd_bench(b_file, b_modes, b_repeat, b_strategy);
        if (gen->parsed()) {
            if (g_n < 1) {
                std::cerr << "n must be >= 1\n";
                return kExitUsage;
            }
            fdt::Strategy s = g_strategy.empty()
                                  ? fdt::Strategy{}
                                  : parse_strategy_flag(g_strategy);
            std::cout << fdt::queens_program(g_n, s);
            return kExitSolution;
        }
    } catch (const fdt::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const fdt::QueryError& e) {
        std::cerr << "query error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fdt::AttributeError& e) {
        std::cerr << "attribute error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}
