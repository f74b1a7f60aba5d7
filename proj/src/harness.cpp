#include "pgsynt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace pgsynt {

namespace {
using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}
} // namespace

std::string verdict_name(RunVerdict v) {
    switch (v) {
        case RunVerdict::kWinning: return "winning";
        case RunVerdict::kNoStrategy: return "no-strategy";
        case RunVerdict::kUnknownWithinBounds: return "unknown-within-bounds";
        case RunVerdict::kTimeout: return "timeout";
        case RunVerdict::kUnsupported: return "unsupported";
    }
    return "?";
}

size_t peak_memory_kb() {
    std::ifstream in("/proc/self/status");
    std::string key;
    size_t value = 0;
    while (in >> key) {
        if (key == "VmHWM:") {
            in >> value;
            return value;
        }
        std::string rest;
        std::getline(in, rest);
    }
    return 0;
}

AttemptResult solve_bounded_attempt(const BoundedUnfolding& unfolding, uint32_t n,
                                    const SolveBudget& budget) {
    AttemptResult r;
    r.pruned = prune_unreachable(unfolding, n);
    r.qbf = encode(r.pruned, n);
    SolveResult sr = solve_cegar(r.qbf, budget);
    r.verdict = sr.verdict;
    r.witness = std::move(sr.witness);
    return r;
}

namespace {

AttemptResult solve_attempt_external(const BoundedUnfolding& unfolding, uint32_t n,
                                     const ExternalSolverConfig& cfg, const std::string& tmp_dir,
                                     const std::string& name, uint32_t b) {
    AttemptResult r;
    r.pruned = prune_unreachable(unfolding, n);
    r.qbf = encode(r.pruned, n);
    std::string path = tmp_dir + "/" + name + "_n" + std::to_string(n) + "_b" +
                       std::to_string(b) + ".qcir";
    write_qcir_file(r.qbf, r.pruned, path);
    SolveResult sr = solve_external(path, cfg);
    r.verdict = sr.verdict;
    r.witness = std::move(sr.witness);
    return r;
}

} // namespace

EngineOutcome search_bounded(const PetriGame& game, const SearchConfig& cfg,
                             const std::string& name) {
    EngineOutcome out;
    out.record.benchmark = name;
    out.record.engine = "bounded";
    auto t0 = Clock::now();
    bool any_timeout = false;

    struct Attempt {
        uint32_t b, n;
        size_t index;
    };

    for (uint32_t b = cfg.b_min; b <= cfg.b_max; ++b) {
        BoundedUnfolding unf;
        try {
            UnfoldOptions uopts;
            uopts.node_budget = cfg.unfold_node_budget;
            unf = bounded_unfolding(game, b, uopts);
        } catch (const BudgetExceeded& e) {
            any_timeout = true;
            out.record.detail = e.what();
            break; // larger b only grows the unfolding
        }

        std::vector<Attempt> attempts;
        for (uint32_t n = cfg.n_min; n <= cfg.n_max; ++n)
            attempts.push_back({b, n, attempts.size()});

        // Waves of `workers` attempts in canonical order; the first SAT in
        // that order wins and later siblings are cancelled cooperatively.
        size_t wave = std::max<unsigned>(cfg.workers, 1);
        for (size_t base = 0; base < attempts.size(); base += wave) {
            size_t count = std::min(wave, attempts.size() - base);
            std::vector<std::optional<AttemptResult>> results(count);
            std::vector<int> failures(count, 0); // 0 ok, 1 timeout
            std::atomic<size_t> first_sat{SIZE_MAX};
            std::vector<std::unique_ptr<std::atomic<bool>>> cancels;
            for (size_t i = 0; i < count; ++i)
                cancels.push_back(std::make_unique<std::atomic<bool>>(false));

            auto run_one = [&](size_t i) {
                const Attempt& a = attempts[base + i];
                SolveBudget budget;
                budget.wall_seconds = cfg.attempt_timeout_seconds;
                budget.cancel = cancels[i].get();
                try {
                    AttemptResult r =
                        cfg.external
                            ? solve_attempt_external(unf, a.n, *cfg.external,
                                                     cfg.external_tmp_dir, name, a.b)
                            : solve_bounded_attempt(unf, a.n, budget);
                    if (r.verdict == Verdict::kSat) {
                        size_t prev = first_sat.load();
                        while (i < prev && !first_sat.compare_exchange_weak(prev, i)) {
                        }
                        // cancel canonical-later attempts
                        for (size_t j = first_sat.load() + 1; j < count; ++j)
                            cancels[j]->store(true);
                    }
                    results[i] = std::move(r);
                } catch (const BudgetExceeded&) {
                    failures[i] = 1;
                } catch (const Timeout&) {
                    failures[i] = 1;
                }
            };

            if (count == 1) {
                run_one(0);
            } else {
                std::vector<std::thread> pool;
                for (size_t i = 0; i < count; ++i) pool.emplace_back(run_one, i);
                for (auto& th : pool) th.join();
            }

            for (size_t i = 0; i < count; ++i) {
                if (failures[i]) {
                    any_timeout = true;
                    continue;
                }
                if (!results[i] || results[i]->verdict != Verdict::kSat) continue;

                const Attempt& a = attempts[base + i];
                AttemptResult& r = *results[i];
                BoundedStrategy strat = decode_strategy(r.pruned, r.qbf.table, r.witness);
                ValidationReport rep = validate_strategy(strat);
                LoopCheck lc = check_loop_or_termination(strat, a.n);
                if (!rep.winning || !lc.ok)
                    throw Error("bounded engine bug: SAT witness failed re-validation at n=" +
                                std::to_string(a.n) + " b=" + std::to_string(a.b));
                StrategyNet net = reachable_induced_net(strat);
                out.record.verdict = RunVerdict::kWinning;
                out.record.n = a.n;
                out.record.b = a.b;
                out.record.strategy_places = net.places.size();
                out.record.strategy_transitions = net.transitions.size();
                out.record.vars_exists = r.qbf.exists.size();
                out.record.vars_forall = r.qbf.forall.size();
                out.record.vars_gates = r.qbf.matrix.num_gates();
                out.record.vars_total =
                    r.qbf.exists.size() + r.qbf.forall.size() + r.qbf.matrix.num_gates();
                out.record.wall_seconds = seconds_since(t0);
                out.record.peak_memory_kb = peak_memory_kb();
                out.strategy = std::move(strat);
                return out;
            }
        }
    }

    out.record.verdict = any_timeout ? RunVerdict::kTimeout : RunVerdict::kUnknownWithinBounds;
    out.record.wall_seconds = seconds_since(t0);
    out.record.peak_memory_kb = peak_memory_kb();
    return out;
}

EngineOutcome solve_symbolic(const PetriGame& game, const SearchConfig& cfg,
                             const std::string& name) {
    EngineOutcome out;
    out.record.benchmark = name;
    out.record.engine = "symbolic";
    auto t0 = Clock::now();

    SupportReport rep = check_supported(game, cfg.explore_limit);
    if (!rep.ok) {
        out.record.verdict = RunVerdict::kUnsupported;
        out.record.detail = rep.reason;
        out.record.wall_seconds = seconds_since(t0);
        return out;
    }
    GameGraph gg;
    try {
        SymbolicOptions opts;
        opts.state_budget = cfg.symbolic_state_budget;
        gg = build_game_graph(game, opts);
    } catch (const StateBudgetExceeded& e) {
        out.record.verdict = RunVerdict::kTimeout;
        out.record.detail = e.what();
        out.record.wall_seconds = seconds_since(t0);
        return out;
    }
    std::optional<SafetySolution> sol = solve_safety(gg);
    if (!sol) {
        out.record.verdict = RunVerdict::kNoStrategy;
        out.record.wall_seconds = seconds_since(t0);
        out.record.peak_memory_kb = peak_memory_kb();
        return out;
    }
    BoundedStrategy strat = translate_strategy(game, gg, *sol);
    StrategyNet net = reachable_induced_net(strat);
    out.record.verdict = RunVerdict::kWinning;
    out.record.strategy_places = net.places.size();
    out.record.strategy_transitions = net.transitions.size();
    out.record.vars_total = bdd_variable_estimate(game, rep.processes);
    out.record.wall_seconds = seconds_since(t0);
    out.record.peak_memory_kb = peak_memory_kb();
    out.strategy = std::move(strat);
    return out;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

template <class T>
std::string opt_str(const std::optional<T>& v) {
    return v ? std::to_string(*v) : "";
}

} // namespace

CompareResult compare(const std::vector<BenchmarkSpec>& specs, const SearchConfig& cfg) {
    CompareResult result;
    std::ostringstream table, times, sizes;
    table << "benchmark,tokens,places,transitions,"
             "sym_verdict,sym_time_s,sym_memory_kb,sym_strategy_places,sym_strategy_transitions,"
             "bnd_verdict,bnd_time_s,bnd_memory_kb,bnd_strategy_places,bnd_strategy_transitions,"
             "n,b\n";
    times << "benchmark,processes,engine,time_s\n";
    sizes << "benchmark,processes,game_transitions,bounded_strategy_transitions,"
             "symbolic_strategy_transitions\n";

    for (const auto& spec : specs) {
        CompareRow row;
        row.catalog = catalog_row(spec);
        PetriGame game = generate(spec);
        std::string name = spec.name();
        EngineOutcome sym = solve_symbolic(game, cfg, name);
        EngineOutcome bnd = search_bounded(game, cfg, name);
        row.symbolic = sym.record;
        row.bounded = bnd.record;

        if (bnd.record.verdict == RunVerdict::kNoStrategy)
            throw AgreementViolation("bounded engine reported no-strategy on " + name);
        bool sym_conclusive = sym.record.verdict == RunVerdict::kWinning ||
                              sym.record.verdict == RunVerdict::kNoStrategy;
        bool bnd_conclusive = bnd.record.verdict == RunVerdict::kWinning;
        if (sym_conclusive && bnd_conclusive &&
            sym.record.verdict == RunVerdict::kNoStrategy)
            throw AgreementViolation("engines disagree on " + name +
                                     ": symbolic=no-strategy, bounded=winning");

        table << csv_escape(name) << "," << row.catalog.tokens << "," << row.catalog.places << ","
              << row.catalog.transitions << "," << verdict_name(sym.record.verdict) << ","
              << sym.record.wall_seconds << "," << sym.record.peak_memory_kb << ","
              << opt_str(sym.record.strategy_places) << ","
              << opt_str(sym.record.strategy_transitions) << ","
              << verdict_name(bnd.record.verdict) << "," << bnd.record.wall_seconds << ","
              << bnd.record.peak_memory_kb << "," << opt_str(bnd.record.strategy_places) << ","
              << opt_str(bnd.record.strategy_transitions) << "," << opt_str(bnd.record.n) << ","
              << opt_str(bnd.record.b) << "\n";
        times << name << "," << row.catalog.tokens << ",symbolic," << sym.record.wall_seconds
              << "\n";
        times << name << "," << row.catalog.tokens << ",bounded," << bnd.record.wall_seconds
              << "\n";
        sizes << name << "," << row.catalog.tokens << "," << row.catalog.transitions << ","
              << opt_str(bnd.record.strategy_transitions) << ","
              << opt_str(sym.record.strategy_transitions) << "\n";

        result.rows.push_back(std::move(row));
    }
    result.table_csv = table.str();
    result.times_csv = times.str();
    result.sizes_csv = sizes.str();
    return result;
}

} // namespace pgsynt
