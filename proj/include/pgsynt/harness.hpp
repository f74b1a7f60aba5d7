#pragma once

#include "pgsynt/benchmarks.hpp"
#include "pgsynt/encoding.hpp"
#include "pgsynt/qbf.hpp"
#include "pgsynt/strategy.hpp"
#include "pgsynt/symbolic.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pgsynt {

struct AgreementViolation : Error { using Error::Error; };

enum class RunVerdict { kWinning, kNoStrategy, kUnknownWithinBounds, kTimeout, kUnsupported };
std::string verdict_name(RunVerdict v);

struct SearchConfig {
    uint32_t b_min = 1, b_max = 6;
    uint32_t n_min = 1, n_max = 30;
    double attempt_timeout_seconds = 60.0;
    unsigned workers = 1;
    std::optional<ExternalSolverConfig> external; // route attempts to an external solver
    std::string external_tmp_dir = ".";           // where QCIR files for it are written
    size_t unfold_node_budget = 100000;
    size_t symbolic_state_budget = 1000000;
    size_t explore_limit = 1000000;
};

struct RunRecord {
    std::string benchmark;
    std::string engine; // "bounded" | "symbolic"
    RunVerdict verdict = RunVerdict::kUnsupported;
    std::optional<uint32_t> n, b;
    double wall_seconds = 0.0;
    size_t peak_memory_kb = 0; // OS-reported high-water estimate
    std::optional<size_t> strategy_places, strategy_transitions;
    std::optional<size_t> vars_total, vars_exists, vars_forall, vars_gates;
    std::string detail;
};

struct EngineOutcome {
    RunRecord record;
    std::optional<BoundedStrategy> strategy;
};

// Bounded engine: iterates b ascending, n ascending within each b, first SAT
// in that canonical order wins; attempts may run on parallel workers. The
// decoded strategy is re-validated before a win is reported. A bounded
// search never concludes no-strategy.
EngineOutcome search_bounded(const PetriGame& game, const SearchConfig& cfg,
                             const std::string& name = "game");

// Symbolic engine: check_supported, build_game_graph, solve_safety,
// translate_strategy.
EngineOutcome solve_symbolic(const PetriGame& game, const SearchConfig& cfg,
                             const std::string& name = "game");

// Solve a fixed (n, b) pair with the bounded pipeline; used by the search,
// the harness grid tests and the CLI.
struct AttemptResult {
    Verdict verdict = Verdict::kUnsat;
    Prenex2Qbf qbf;             // the encoding that was solved
    BoundedUnfolding pruned;    // its unfolding
    std::map<uint32_t, bool> witness;
};
AttemptResult solve_bounded_attempt(const BoundedUnfolding& unfolding, uint32_t n,
                                    const SolveBudget& budget);

struct CompareRow {
    CatalogRow catalog;
    RunRecord symbolic;
    RunRecord bounded;
};

struct CompareResult {
    std::vector<CompareRow> rows;
    std::string table_csv;
    std::string times_csv;
    std::string sizes_csv;
};

// Runs both engines on every spec, enforcing verdict agreement wherever both
// are conclusive (a violation is an engine bug and throws), and renders the
// comparison table plus plot data.
CompareResult compare(const std::vector<BenchmarkSpec>& specs, const SearchConfig& cfg);

size_t peak_memory_kb();

} // namespace pgsynt
