#include "pgsynt/qbf.hpp"

#include "pgsynt/encoding.hpp"
#include "pgsynt/sat.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace pgsynt {

namespace {

using Clock = std::chrono::steady_clock;

// Tseitin-translates the matrix under a partial assignment, folding
// constants away. Gate auxiliaries reuse ids starting at `aux_base` (always
// above every QBF variable). Returns the output as a literal, or a constant
// when the whole matrix folds.
struct Clausified {
    bool is_const = false;
    bool const_value = false;
    Lit lit = 0;
};

Clausified clausify_under(const Circuit& c, const std::vector<int8_t>& fixed, uint32_t& aux_base,
                          SatSolver& solver) {
    constexpr Lit kTrue = INT32_MAX;
    auto resolve_arg = [](Lit stored, Lit arg) {
        // stored is the resolution of lit_id(arg); apply arg's sign
        if (stored == kTrue) return arg < 0 ? -kTrue : kTrue;
        if (stored == -kTrue) return arg < 0 ? kTrue : -kTrue;
        return arg < 0 ? -stored : stored;
    };

    std::vector<Lit> res(c.max_id() + 1, 0);
    for (uint32_t v = 1; v <= c.num_vars(); ++v) {
        if (v < fixed.size() && fixed[v] >= 0)
            res[v] = fixed[v] ? kTrue : -kTrue;
        else
            res[v] = static_cast<Lit>(v);
    }

    for (uint32_t gid = c.first_gate_id(); gid <= c.max_id(); ++gid) {
        const Gate& gate = c.gate(gid);
        bool is_and = gate.kind == Gate::kAnd;
        std::vector<Lit> args;
        bool folded = false;
        for (Lit a : gate.args) {
            Lit r = resolve_arg(res[lit_id(a)], a);
            if (r == kTrue) {
                if (!is_and) { res[gid] = kTrue; folded = true; break; }
            } else if (r == -kTrue) {
                if (is_and) { res[gid] = -kTrue; folded = true; break; }
            } else {
                args.push_back(r);
            }
        }
        if (folded) continue;
        if (args.empty()) {
            res[gid] = is_and ? kTrue : -kTrue;
        } else if (args.size() == 1) {
            res[gid] = args[0];
        } else {
            Lit gl = static_cast<Lit>(aux_base++);
            if (is_and) {
                std::vector<Lit> big{gl};
                for (Lit a : args) {
                    solver.add_clause({-gl, a});
                    big.push_back(-a);
                }
                solver.add_clause(std::move(big));
            } else {
                std::vector<Lit> big{-gl};
                for (Lit a : args) {
                    solver.add_clause({gl, -a});
                    big.push_back(a);
                }
                solver.add_clause(std::move(big));
            }
            res[gid] = gl;
        }
    }

    Lit out = resolve_arg(res[lit_id(c.output())], c.output());
    Clausified r;
    if (out == kTrue || out == -kTrue) {
        r.is_const = true;
        r.const_value = out == kTrue;
    } else {
        r.lit = out;
    }
    return r;
}

} // namespace

// ---------------------------------------------------------------------------
// CEGAR
// ---------------------------------------------------------------------------

SolveResult solve_cegar(const Prenex2Qbf& qbf, const SolveBudget& budget) {
    qbf.validate();
    auto start = Clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    SolveResult result;
    SatSolver abstraction;
    uint32_t aux_base = qbf.matrix.max_id() + 1;

    const uint64_t hard_cap =
        qbf.exists.size() < 63 ? (1ull << qbf.exists.size()) + 1 : UINT64_MAX;

    std::vector<int8_t> fixed(qbf.matrix.num_vars() + 1, -1);

    for (;;) {
        if (budget.cancel && budget.cancel->load()) throw BudgetExceeded("cegar cancelled");
        if (budget.wall_seconds && elapsed() > *budget.wall_seconds)
            throw BudgetExceeded("cegar wall budget exhausted");
        if (budget.max_iterations && result.stats.iterations >= *budget.max_iterations)
            throw BudgetExceeded("cegar iteration budget exhausted");
        if (result.stats.iterations > hard_cap)
            throw Error("cegar exceeded its theoretical iteration bound");
        ++result.stats.iterations;

        // 1. candidate existential assignment from the abstraction
        ++result.stats.sat_calls;
        if (abstraction.solve() == SatSolver::Result::kUnsat) {
            result.verdict = Verdict::kUnsat;
            result.stats.wall_seconds = elapsed();
            return result;
        }
        std::fill(fixed.begin(), fixed.end(), static_cast<int8_t>(-1));
        for (uint32_t v : qbf.exists) fixed[v] = abstraction.value(v) ? 1 : 0;

        // 2. counterexample search: does some universal assignment falsify
        // the matrix under the candidate?
        SatSolver check;
        uint32_t check_aux = qbf.matrix.max_id() + 1;
        Clausified m = clausify_under(qbf.matrix, fixed, check_aux, check);
        bool have_cex = false;
        std::vector<int8_t> cex(qbf.matrix.num_vars() + 1, -1);
        if (m.is_const) {
            if (m.const_value) {
                have_cex = false;
            } else {
                have_cex = true; // falsified for every universal assignment
                for (uint32_t u : qbf.forall) cex[u] = 0;
            }
        } else {
            check.add_clause({-m.lit});
            ++result.stats.sat_calls;
            if (check.solve() == SatSolver::Result::kSat) {
                have_cex = true;
                for (uint32_t u : qbf.forall) cex[u] = check.value(u) ? 1 : 0;
            }
        }

        if (!have_cex) {
            // The check doubles as re-verification of the witness.
            result.verdict = Verdict::kSat;
            for (uint32_t v : qbf.exists) result.witness[v] = fixed[v] == 1;
            result.stats.wall_seconds = elapsed();
            return result;
        }

        // 3. refine: the matrix must hold under the found counterexample.
        Clausified ref = clausify_under(qbf.matrix, cex, aux_base, abstraction);
        if (ref.is_const) {
            if (ref.const_value)
                throw Error("cegar refinement vacuous; counterexample was not one");
            abstraction.add_clause({}); // no existential assignment survives
        } else {
            abstraction.add_clause({ref.lit});
        }
    }
}

// ---------------------------------------------------------------------------
// Brute force
// ---------------------------------------------------------------------------

Verdict brute_force_2qbf_serial(const Prenex2Qbf& qbf, size_t var_cap) {
    qbf.validate();
    size_t total = qbf.exists.size() + qbf.forall.size();
    if (total > var_cap)
        throw CapExceeded("brute force cap " + std::to_string(var_cap) + " exceeded by " +
                          std::to_string(total) + " variables");

    std::vector<char> values(qbf.matrix.num_vars() + 1, 0);
    uint64_t e_space = 1ull << qbf.exists.size();
    uint64_t u_space = 1ull << qbf.forall.size();
    for (uint64_t e = 0; e < e_space; ++e) {
        for (size_t i = 0; i < qbf.exists.size(); ++i)
            values[qbf.exists[i]] = static_cast<char>((e >> i) & 1);
        bool all = true;
        for (uint64_t u = 0; u < u_space && all; ++u) {
            for (size_t i = 0; i < qbf.forall.size(); ++i)
                values[qbf.forall[i]] = static_cast<char>((u >> i) & 1);
            if (!qbf.matrix.eval(values)) all = false;
        }
        if (all) return Verdict::kSat;
    }
    return Verdict::kUnsat;
}

Verdict brute_force_2qbf(const Prenex2Qbf& qbf, size_t var_cap) {
    qbf.validate();
    size_t total = qbf.exists.size() + qbf.forall.size();
    if (total > var_cap)
        throw CapExceeded("brute force cap " + std::to_string(var_cap) + " exceeded by " +
                          std::to_string(total) + " variables");

    const size_t U = qbf.forall.size();
    const size_t lane_bits = U < 6 ? U : 6;
    const uint64_t lanes = 1ull << lane_bits;
    const uint64_t lane_mask = lanes == 64 ? ~0ull : (1ull << lanes) - 1;
    const uint64_t blocks = 1ull << (U - lane_bits);
    const int64_t e_space = 1ll << qbf.exists.size();

    // lane patterns for the first lane_bits universal variables
    std::vector<uint64_t> pattern(lane_bits);
    for (size_t k = 0; k < lane_bits; ++k) {
        uint64_t w = 0;
        for (uint64_t lane = 0; lane < 64; ++lane)
            if ((lane >> k) & 1) w |= 1ull << lane;
        pattern[k] = w;
    }

    std::atomic<bool> found{false};
#pragma omp parallel for schedule(dynamic, 16)
    for (int64_t e = 0; e < e_space; ++e) {
        if (found.load(std::memory_order_relaxed)) continue;
        std::vector<uint64_t> words(qbf.matrix.num_vars() + 1, 0);
        for (size_t i = 0; i < qbf.exists.size(); ++i)
            words[qbf.exists[i]] = ((static_cast<uint64_t>(e) >> i) & 1) ? ~0ull : 0;
        bool all = true;
        for (uint64_t block = 0; block < blocks && all; ++block) {
            for (size_t i = 0; i < U; ++i) {
                if (i < lane_bits)
                    words[qbf.forall[i]] = pattern[i];
                else
                    words[qbf.forall[i]] = ((block >> (i - lane_bits)) & 1) ? ~0ull : 0;
            }
            uint64_t ok = qbf.matrix.eval_bitsliced(words);
            if ((ok & lane_mask) != lane_mask) all = false;
        }
        if (all) found.store(true, std::memory_order_relaxed);
    }
    return found.load() ? Verdict::kSat : Verdict::kUnsat;
}

// ---------------------------------------------------------------------------
// External solver
// ---------------------------------------------------------------------------

SolveResult solve_external(const std::string& qcir_path, const ExternalSolverConfig& cfg) {
    std::string cmd = cfg.command_template;
    const std::string placeholder = "{file}";
    for (size_t at = cmd.find(placeholder); at != std::string::npos; at = cmd.find(placeholder))
        cmd.replace(at, placeholder.size(), qcir_path);

    auto start = Clock::now();
    int fds[2];
    if (pipe(fds) != 0) throw SolverCrashed("pipe failed");
    pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        throw SolverCrashed("fork failed");
    }
    if (pid == 0) {
        dup2(fds[1], STDOUT_FILENO);
        close(fds[0]);
        close(fds[1]);
        execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(fds[1]);

    std::string output;
    bool timed_out = false;
    char buf[4096];
    for (;;) {
        double left = cfg.timeout_seconds -
                      std::chrono::duration<double>(Clock::now() - start).count();
        if (left <= 0) { timed_out = true; break; }
        struct pollfd pfd{fds[0], POLLIN, 0};
        int pr = poll(&pfd, 1, static_cast<int>(std::min(left * 1000.0, 250.0)));
        if (pr < 0) break;
        if (pr == 0) continue;
        ssize_t got = read(fds[0], buf, sizeof buf);
        if (got <= 0) break;
        output.append(buf, static_cast<size_t>(got));
    }
    close(fds[0]);
    if (timed_out) {
        kill(pid, SIGKILL);
        waitpid(pid, nullptr, 0);
        throw Timeout("external solver exceeded " + std::to_string(cfg.timeout_seconds) + "s");
    }
    int status = 0;
    waitpid(pid, &status, 0);
    if (!WIFEXITED(status)) throw SolverCrashed("external solver killed by signal");
    int code = WEXITSTATUS(status);

    SolveResult result;
    result.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (code == cfg.unsat_exit_code) {
        result.verdict = Verdict::kUnsat;
        return result;
    }
    if (code != cfg.sat_exit_code)
        throw SolverCrashed("external solver exited with unexpected code " + std::to_string(code));

    result.verdict = Verdict::kSat;
    VarsSidecar sidecar = read_vars_sidecar(qcir_path + ".vars");
    for (const auto& [id, unused] : sidecar.svars) {
        (void)unused;
        result.witness[id] = false;
    }
    std::istringstream lines(output);
    std::string line;
    bool saw_witness_line = false;
    while (std::getline(lines, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag != "V" && tag != "v") continue;
        saw_witness_line = true;
        long lit;
        while (ls >> lit) {
            if (lit == 0) continue;
            uint32_t var = static_cast<uint32_t>(lit < 0 ? -lit : lit);
            if (sidecar.svars.count(var)) result.witness[var] = lit > 0;
        }
        if (ls.fail() && !ls.eof())
            throw UnparsableOutput("unparsable witness line: " + line);
    }
    if (!saw_witness_line && !sidecar.svars.empty())
        throw UnparsableOutput("solver reported SAT but printed no witness lines");
    return result;
}

} // namespace pgsynt
