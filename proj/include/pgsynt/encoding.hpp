#pragma once

#include "pgsynt/circuit.hpp"
#include "pgsynt/unfolding.hpp"

#include <iosfwd>
#include <string>

namespace pgsynt {

// ---------------------------------------------------------------------------
// Bounded-synthesis encoding: builds the prenex 2-QBF
//
//   exists(strategy vars) forall(marking vars) .
//     /\_{i<n} (sequence_i => win_i)  /\  (sequence_n => win_n /\ loop)
//
// over a pruned bounded unfolding. Strategy variables are shared per
// (system place copy, original transition), so justified refusal holds for
// every decoded strategy by construction. Environment-only transitions have
// no strategy variable and are always allowed.
// ---------------------------------------------------------------------------

Prenex2Qbf encode(const BoundedUnfolding& unf, uint32_t n);

// QCIR-G14 emission: deterministic byte output, streaming. The sidecar
// written next to it maps variables back to the unfolding:
//   svar <id> <place> <original-transition>
//   mvar <id> <place> <time>
void emit_qcir(const Prenex2Qbf& qbf, std::ostream& sink);
std::string emit_qcir_string(const Prenex2Qbf& qbf);
// Writes <path> and the <path>.vars sidecar.
void write_qcir_file(const Prenex2Qbf& qbf, const BoundedUnfolding& unf, const std::string& path);

Prenex2Qbf parse_qcir(std::istream& in);
Prenex2Qbf parse_qcir_string(const std::string& text);

struct VarsSidecar {
    // var id -> (place name, transition name) for strategy vars
    std::map<uint32_t, std::pair<std::string, std::string>> svars;
    // var id -> (place name, time) for marking vars
    std::map<uint32_t, std::pair<std::string, uint32_t>> mvars;
};

void write_vars_sidecar(const std::string& path, const BoundedUnfolding& unf,
                        const VariableTable& table);
VarsSidecar read_vars_sidecar(const std::string& path);

} // namespace pgsynt
