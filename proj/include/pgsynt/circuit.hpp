#pragma once

#include "pgsynt/petri.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace pgsynt {

// Signed literal over a shared id space: variables and gates are positive
// ids, negation flips the sign. Id 0 is unused.
using Lit = int32_t;

inline uint32_t lit_id(Lit l) { return static_cast<uint32_t>(l < 0 ? -l : l); }
inline bool lit_sign(Lit l) { return l > 0; }

// ---------------------------------------------------------------------------
// Circuit: AND/OR gates over literals. Inputs occupy ids 1..num_vars, gates
// are allocated above them in definition order and may only reference
// already-defined ids, which keeps the circuit acyclic by construction.
// The empty AND is true, the empty OR is false.
// ---------------------------------------------------------------------------

struct Gate {
    enum Kind : uint8_t { kAnd, kOr };
    Kind kind;
    std::vector<Lit> args;
};

class Circuit {
public:
    explicit Circuit(uint32_t num_vars = 0) : num_vars_(num_vars) {}

    uint32_t num_vars() const { return num_vars_; }
    void set_num_vars(uint32_t n) { num_vars_ = n; }

    uint32_t first_gate_id() const { return num_vars_ + 1; }
    uint32_t num_gates() const { return static_cast<uint32_t>(gates_.size()); }
    uint32_t max_id() const { return num_vars_ + num_gates(); }

    const Gate& gate(uint32_t id) const { return gates_[id - first_gate_id()]; }
    bool is_gate(uint32_t id) const { return id >= first_gate_id() && id <= max_id(); }

    Lit add_gate(Gate::Kind kind, std::vector<Lit> args);
    Lit add_and(std::vector<Lit> args) { return add_gate(Gate::kAnd, std::move(args)); }
    Lit add_or(std::vector<Lit> args) { return add_gate(Gate::kOr, std::move(args)); }
    Lit add_true() { return add_and({}); }
    Lit add_false() { return add_or({}); }
    // (a <-> b) as an OR of the two agreeing cases.
    Lit add_iff(Lit a, Lit b);
    Lit add_implies(Lit a, Lit b) { return add_or({-a, b}); }

    Lit output() const { return output_; }
    void set_output(Lit l) { output_ = l; }

    // Evaluates under a full assignment of the input variables
    // (values[1..num_vars]); gate values are computed in definition order.
    bool eval(const std::vector<char>& values) const;

    // 64 assignments at once; words[v] holds one bit per lane for input v.
    uint64_t eval_bitsliced(const std::vector<uint64_t>& words) const;

private:
    uint32_t num_vars_ = 0;
    std::vector<Gate> gates_;
    Lit output_ = 0;
};

// ---------------------------------------------------------------------------
// Variable table tying QBF variables back to the unfolding: strategy
// variables per (system place copy, original transition), marking variables
// per (place copy, time point).
// ---------------------------------------------------------------------------

struct VariableTable {
    std::map<std::pair<PlaceId, TransId>, uint32_t> strategy; // (copy, original) -> var
    std::map<std::pair<PlaceId, uint32_t>, uint32_t> marking; // (copy, time) -> var
    uint32_t num_vars = 0;

    uint32_t svar(PlaceId p, TransId orig) const { return strategy.at({p, orig}); }
    uint32_t mvar(PlaceId p, uint32_t time) const { return marking.at({p, time}); }
};

// ---------------------------------------------------------------------------
// Prenex 2-QBF: exists(strategy) forall(markings) . matrix
// ---------------------------------------------------------------------------

struct Prenex2Qbf {
    std::vector<uint32_t> exists;
    std::vector<uint32_t> forall;
    Circuit matrix;
    VariableTable table;

    // Checks the prenex invariants (disjoint blocks, all inputs quantified).
    void validate() const;
};

} // namespace pgsynt
