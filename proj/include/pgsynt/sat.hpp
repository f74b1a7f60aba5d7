#pragma once

#include "pgsynt/circuit.hpp"

#include <cstdint>
#include <vector>

namespace pgsynt {

// ---------------------------------------------------------------------------
// Conflict-driven clause learning SAT solver: two-watched literals, first-UIP
// learning, activity-based branching with phase saving and Luby restarts.
// Deterministic for a fixed seed. Built for correctness at desk scale.
// ---------------------------------------------------------------------------

class SatSolver {
public:
    enum class Result { kSat, kUnsat };

    explicit SatSolver(uint64_t seed = 0) : seed_(seed) {}

    // Clauses use the shared Lit convention (+v / -v, v >= 1). Variables are
    // created on demand. May be called between solve() calls; the solver is
    // then reset to its root level.
    void add_clause(std::vector<Lit> lits);

    Result solve();

    // Model access after kSat.
    bool value(uint32_t var) const;
    uint32_t num_vars() const { return static_cast<uint32_t>(assign_.size()); }

    struct Stats {
        uint64_t decisions = 0;
        uint64_t conflicts = 0;
        uint64_t propagations = 0;
    };
    const Stats& stats() const { return stats_; }

private:
    // Internal literal encoding: 2v for +v, 2v+1 for -v.
    using ILit = uint32_t;
    static ILit intern(Lit l) {
        uint32_t v = lit_id(l);
        return (v << 1) | (l < 0 ? 1u : 0u);
    }
    static ILit negate(ILit l) { return l ^ 1u; }
    static uint32_t var_of(ILit l) { return l >> 1; }

    struct Clause {
        std::vector<ILit> lits;
        bool learnt = false;
    };

    void ensure_var(uint32_t v);
    bool enqueue(ILit l, int32_t reason);
    int32_t propagate();
    void analyze(int32_t confl, std::vector<ILit>& learnt, int& backjump);
    void backtrack(int level);
    ILit pick_branch();
    void bump(uint32_t v);
    void decay();
    void attach(int32_t ci);

    std::vector<Clause> clauses_;
    std::vector<std::vector<int32_t>> watches_; // per internal literal
    std::vector<int8_t> assign_;                // per var: -1 unset, 0 false, 1 true
    std::vector<int8_t> phase_;
    std::vector<int32_t> reason_;
    std::vector<int32_t> level_;
    std::vector<ILit> trail_;
    std::vector<size_t> trail_lim_;
    size_t qhead_ = 0;

    std::vector<double> activity_;
    double bump_inc_ = 1.0;
    std::vector<uint32_t> heap_;     // max-heap of vars by (activity, smaller id)
    std::vector<int32_t> heap_pos_;  // -1 if absent
    void heap_insert(uint32_t v);
    uint32_t heap_pop();
    void heap_up(size_t i);
    void heap_down(size_t i);
    bool heap_less(uint32_t a, uint32_t b) const;

    std::vector<char> seen_;
    bool unsat_ = false;
    uint64_t seed_ = 0;
    Stats stats_;
};

} // namespace pgsynt
