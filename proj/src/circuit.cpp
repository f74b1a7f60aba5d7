#include "pgsynt/circuit.hpp"

#include <algorithm>
#include <unordered_set>

namespace pgsynt {

Lit Circuit::add_gate(Gate::Kind kind, std::vector<Lit> args) {
    uint32_t id = max_id() + 1;
    for (Lit a : args) {
        if (a == 0 || lit_id(a) >= id)
            throw Error("gate argument references an undefined id");
    }
    gates_.push_back({kind, std::move(args)});
    return static_cast<Lit>(id);
}

Lit Circuit::add_iff(Lit a, Lit b) {
    Lit both = add_and({a, b});
    Lit neither = add_and({-a, -b});
    return add_or({both, neither});
}

bool Circuit::eval(const std::vector<char>& values) const {
    std::vector<char> val(max_id() + 1, 0);
    for (uint32_t v = 1; v <= num_vars_ && v < values.size(); ++v) val[v] = values[v];
    for (uint32_t g = 0; g < num_gates(); ++g) {
        const Gate& gate = gates_[g];
        bool acc = gate.kind == Gate::kAnd;
        for (Lit a : gate.args) {
            bool x = val[lit_id(a)];
            if (a < 0) x = !x;
            if (gate.kind == Gate::kAnd)
                acc = acc && x;
            else
                acc = acc || x;
            if (gate.kind == Gate::kAnd ? !acc : acc) break;
        }
        val[first_gate_id() + g] = acc;
    }
    bool out = val[lit_id(output_)];
    return output_ < 0 ? !out : out;
}

uint64_t Circuit::eval_bitsliced(const std::vector<uint64_t>& words) const {
    std::vector<uint64_t> val(max_id() + 1, 0);
    for (uint32_t v = 1; v <= num_vars_ && v < words.size(); ++v) val[v] = words[v];
    for (uint32_t g = 0; g < num_gates(); ++g) {
        const Gate& gate = gates_[g];
        uint64_t acc = gate.kind == Gate::kAnd ? ~0ull : 0ull;
        for (Lit a : gate.args) {
            uint64_t x = val[lit_id(a)];
            if (a < 0) x = ~x;
            if (gate.kind == Gate::kAnd)
                acc &= x;
            else
                acc |= x;
        }
        val[first_gate_id() + g] = acc;
    }
    uint64_t out = val[lit_id(output_)];
    return output_ < 0 ? ~out : out;
}

void Prenex2Qbf::validate() const {
    std::unordered_set<uint32_t> quantified;
    for (uint32_t v : exists)
        if (!quantified.insert(v).second) throw Error("variable quantified twice");
    for (uint32_t v : forall)
        if (!quantified.insert(v).second) throw Error("variable quantified twice");
    for (uint32_t v = 1; v <= matrix.num_vars(); ++v)
        if (!quantified.count(v)) throw Error("matrix input " + std::to_string(v) + " unquantified");
    if (matrix.output() == 0) throw Error("matrix has no output");
}

} // namespace pgsynt
