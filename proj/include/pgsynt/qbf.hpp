#pragma once

#include "pgsynt/circuit.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace pgsynt {

struct SolverCrashed : Error { using Error::Error; };
struct Timeout : Error { using Error::Error; };
struct UnparsableOutput : Error { using Error::Error; };
struct CapExceeded : Error { using Error::Error; };

enum class Verdict { kSat, kUnsat };

struct SolveResult {
    Verdict verdict = Verdict::kUnsat;
    std::map<uint32_t, bool> witness; // every existential variable, iff SAT
    struct Stats {
        uint64_t iterations = 0;   // abstraction refinements
        uint64_t sat_calls = 0;
        double wall_seconds = 0.0;
    } stats;
};

struct SolveBudget {
    std::optional<double> wall_seconds;
    std::optional<uint64_t> max_iterations;
    // Cooperative cancellation; checked once per CEGAR iteration.
    const std::atomic<bool>* cancel = nullptr;
};

// ---------------------------------------------------------------------------
// CEGAR decision procedure for exists-forall QBF. Candidate existential
// assignments are drawn from an abstraction (initially unconstrained) and
// checked by solving the negated matrix over the universals; counterexamples
// are fed back as constraints on the existentials. Sound and complete.
// ---------------------------------------------------------------------------

SolveResult solve_cegar(const Prenex2Qbf& qbf, const SolveBudget& budget = {});

// ---------------------------------------------------------------------------
// Exhaustive exists-forall evaluation. The parallel version enumerates the
// existential space with OpenMP and evaluates universals 64 lanes at a time;
// the serial version is the plain reference kept for testing.
// ---------------------------------------------------------------------------

Verdict brute_force_2qbf(const Prenex2Qbf& qbf, size_t var_cap = 24);
Verdict brute_force_2qbf_serial(const Prenex2Qbf& qbf, size_t var_cap = 24);

// ---------------------------------------------------------------------------
// External QCIR solver driver. The command template's "{file}" placeholder is
// replaced by the problem path; the default protocol is exit code 10 = SAT,
// 20 = UNSAT, witness literals on stdout lines "V <lit>". The existential
// assignment is decoded through the .vars sidecar next to the QCIR file.
// ---------------------------------------------------------------------------

struct ExternalSolverConfig {
    std::string command_template; // e.g. "quabs --partial-assignment {file}"
    int sat_exit_code = 10;
    int unsat_exit_code = 20;
    double timeout_seconds = 60.0;
};

SolveResult solve_external(const std::string& qcir_path, const ExternalSolverConfig& cfg);

} // namespace pgsynt
