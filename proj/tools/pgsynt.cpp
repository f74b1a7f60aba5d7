// pgsynt: synthesis of distributed controllers for safe Petri games.
//
// Subcommands: gen, solve, bench, compare, check, emit-qcir.
// Exit codes: 0 winning, 1 no-strategy, 2 unknown-within-bounds,
// 3 error/unsupported.

#include "pgsynt/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace pgsynt;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spill(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
}

int exit_code(RunVerdict v) {
    switch (v) {
        case RunVerdict::kWinning: return 0;
        case RunVerdict::kNoStrategy: return 1;
        case RunVerdict::kUnknownWithinBounds: return 2;
        case RunVerdict::kTimeout: return 2;
        case RunVerdict::kUnsupported: return 3;
    }
    return 3;
}

void print_record(const RunRecord& r) {
    std::cout << r.benchmark << " [" << r.engine << "] " << verdict_name(r.verdict);
    if (r.n) std::cout << " n=" << *r.n;
    if (r.b) std::cout << " b=" << *r.b;
    if (r.strategy_places)
        std::cout << " strategy=" << *r.strategy_places << "p/" << *r.strategy_transitions << "t";
    if (r.vars_total) std::cout << " vars=" << *r.vars_total;
    std::cout << " time=" << r.wall_seconds << "s mem~" << r.peak_memory_kb << "kB";
    if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
    std::cout << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Petri game synthesis: bounded (QBF) and explicit-state symbolic engines"};
    app.require_subcommand(1);

    // --- gen ---
    auto* gen_cmd = app.add_subcommand("gen", "generate a benchmark game file");
    std::string gen_spec, gen_out;
    gen_cmd->add_option("spec", gen_spec, "family:m[:k], e.g. as:2 or cm:3:1")->required();
    gen_cmd->add_option("-o,--out", gen_out, "output file (default <name>.game)");

    // --- shared engine options ---
    SearchConfig cfg;
    std::string engine = "both";
    std::string out_dir = ".";
    std::string external_cmd;
    auto add_engine_opts = [&](CLI::App* cmd, bool with_engine) {
        if (with_engine)
            cmd->add_option("--engine", engine, "bounded | symbolic | both")
                ->check(CLI::IsMember({"bounded", "symbolic", "both"}));
        cmd->add_option("--n-max", cfg.n_max, "largest simulation length");
        cmd->add_option("--b-max", cfg.b_max, "largest memory bound");
        cmd->add_option("--n-min", cfg.n_min, "smallest simulation length");
        cmd->add_option("--b-min", cfg.b_min, "smallest memory bound");
        cmd->add_option("--timeout", cfg.attempt_timeout_seconds, "per-attempt budget (seconds)");
        cmd->add_option("--workers", cfg.workers, "parallel (n,b) attempts");
        cmd->add_option("--external-solver", external_cmd,
                        "external QCIR solver command with {file} placeholder");
        cmd->add_option("--out", out_dir, "output directory");
    };

    // --- solve ---
    auto* solve_cmd = app.add_subcommand("solve", "solve a single game file");
    std::string solve_file;
    solve_cmd->add_option("game", solve_file, "game file")->required();
    add_engine_opts(solve_cmd, true);

    // --- bench ---
    auto* bench_cmd = app.add_subcommand("bench", "run engines over benchmark instances");
    std::vector<std::string> bench_specs;
    bench_cmd->add_option("--spec", bench_specs, "benchmark spec family:m[:k] (repeatable)")
        ->required();
    add_engine_opts(bench_cmd, true);

    // --- compare ---
    auto* compare_cmd = app.add_subcommand("compare", "run both engines and emit comparison CSVs");
    std::vector<std::string> compare_specs;
    compare_cmd->add_option("--spec", compare_specs, "benchmark spec (repeatable)");
    add_engine_opts(compare_cmd, false);

    // --- check ---
    auto* check_cmd = app.add_subcommand("check", "validate a strategy file");
    std::string check_file;
    check_cmd->add_option("strategy", check_file, "strategy file")->required();

    // --- emit-qcir ---
    auto* emit_cmd = app.add_subcommand("emit-qcir", "emit the QBF encoding of a game");
    std::string emit_game, emit_out;
    uint32_t emit_n = 6, emit_b = 1;
    emit_cmd->add_option("game", emit_game, "game file")->required();
    emit_cmd->add_option("-n", emit_n, "simulation length")->required();
    emit_cmd->add_option("-b", emit_b, "memory bound")->required();
    emit_cmd->add_option("-o,--out", emit_out, "output path (default <game>.qcir)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!external_cmd.empty()) {
            ExternalSolverConfig ext;
            ext.command_template = external_cmd;
            ext.timeout_seconds = cfg.attempt_timeout_seconds;
            cfg.external = ext;
            cfg.external_tmp_dir = out_dir;
        }

        if (*gen_cmd) {
            BenchmarkSpec spec = parse_benchmark_spec(gen_spec);
            std::string path = gen_out.empty() ? spec.name() + ".game" : gen_out;
            spill(path, serialize_game(generate(spec)));
            std::cout << path << "\n";
            return 0;
        }

        if (*solve_cmd) {
            PetriGame game = parse_game(slurp(solve_file));
            std::string name = fs::path(solve_file).stem().string();
            fs::create_directories(out_dir);
            int code = 3;
            if (engine == "bounded" || engine == "both") {
                EngineOutcome r = search_bounded(game, cfg, name);
                print_record(r.record);
                if (r.strategy)
                    spill(out_dir + "/" + name + ".bounded.strategy",
                          serialize_strategy(*r.strategy));
                code = exit_code(r.record.verdict);
            }
            if (engine == "symbolic" || engine == "both") {
                EngineOutcome r = solve_symbolic(game, cfg, name);
                print_record(r.record);
                if (r.strategy)
                    spill(out_dir + "/" + name + ".symbolic.strategy",
                          serialize_strategy(*r.strategy));
                int c = exit_code(r.record.verdict);
                code = engine == "symbolic" ? c : std::min(code, c);
            }
            return code;
        }

        if (*bench_cmd) {
            fs::create_directories(out_dir);
            std::ostringstream csv;
            csv << "benchmark,engine,verdict,n,b,time_s,memory_kb,strategy_places,"
                   "strategy_transitions,vars_total\n";
            for (const auto& text : bench_specs) {
                BenchmarkSpec spec = parse_benchmark_spec(text);
                PetriGame game = generate(spec);
                std::vector<EngineOutcome> outcomes;
                if (engine == "bounded" || engine == "both")
                    outcomes.push_back(search_bounded(game, cfg, spec.name()));
                if (engine == "symbolic" || engine == "both")
                    outcomes.push_back(solve_symbolic(game, cfg, spec.name()));
                for (const auto& o : outcomes) {
                    print_record(o.record);
                    const RunRecord& r = o.record;
                    csv << r.benchmark << "," << r.engine << "," << verdict_name(r.verdict) << ","
                        << (r.n ? std::to_string(*r.n) : "") << ","
                        << (r.b ? std::to_string(*r.b) : "") << "," << r.wall_seconds << ","
                        << r.peak_memory_kb << ","
                        << (r.strategy_places ? std::to_string(*r.strategy_places) : "") << ","
                        << (r.strategy_transitions ? std::to_string(*r.strategy_transitions) : "")
                        << "," << (r.vars_total ? std::to_string(*r.vars_total) : "") << "\n";
                    if (o.strategy)
                        spill(out_dir + "/" + r.benchmark + "." + r.engine + ".strategy",
                              serialize_strategy(*o.strategy));
                }
            }
            spill(out_dir + "/records.csv", csv.str());
            return 0;
        }

        if (*compare_cmd) {
            fs::create_directories(out_dir);
            std::vector<BenchmarkSpec> specs;
            for (const auto& text : compare_specs) specs.push_back(parse_benchmark_spec(text));
            CompareResult result = compare(specs, cfg);
            spill(out_dir + "/table.csv", result.table_csv);
            spill(out_dir + "/times.csv", result.times_csv);
            spill(out_dir + "/sizes.csv", result.sizes_csv);
            for (const auto& row : result.rows) {
                print_record(row.symbolic);
                print_record(row.bounded);
            }
            std::cout << "wrote " << out_dir << "/table.csv, times.csv, sizes.csv\n";
            return 0;
        }

        if (*check_cmd) {
            BoundedStrategy s = parse_strategy_standalone(slurp(check_file));
            ValidationReport report = validate_strategy(s);
            if (report.winning) {
                std::cout << "winning (" << report.explored << " markings explored)\n";
                return 0;
            }
            std::cout << "violation: ";
            switch (*report.violation) {
                case Violation::kBadPlaceReached: std::cout << "bad place reached"; break;
                case Violation::kNondeterministic: std::cout << "nondeterministic"; break;
                case Violation::kDeadlockNotTermination:
                    std::cout << "deadlock without termination";
                    break;
            }
            std::cout << "; witness play of " << report.witness.size() << " markings\n";
            return 1;
        }

        if (*emit_cmd) {
            PetriGame game = parse_game(slurp(emit_game));
            BoundedUnfolding unf = bounded_unfolding(game, emit_b);
            BoundedUnfolding pruned = prune_unreachable(unf, emit_n);
            Prenex2Qbf qbf = encode(pruned, emit_n);
            std::string path =
                emit_out.empty() ? fs::path(emit_game).stem().string() + ".qcir" : emit_out;
            write_qcir_file(qbf, pruned, path);
            std::cout << path << " vars=" << qbf.exists.size() + qbf.forall.size() << " gates="
                      << qbf.matrix.num_gates() << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
