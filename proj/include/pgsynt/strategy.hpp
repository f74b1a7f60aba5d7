#pragma once

#include "pgsynt/circuit.hpp"
#include "pgsynt/unfolding.hpp"

#include <map>
#include <optional>

namespace pgsynt {

struct IncompleteWitness : Error { using Error::Error; };
struct NotDistributable : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// A bounded strategy: the system's allow/refuse decisions over a bounded
// unfolding. Decisions are per (system place copy, original transition), so
// justified refusal holds structurally. A transition copy is part of the
// induced net iff every system place copy in its preset allows its original.
// ---------------------------------------------------------------------------

struct BoundedStrategy {
    BoundedUnfolding base;
    std::map<std::pair<PlaceId, TransId>, bool> allowed;

    bool allows(TransId copy) const {
        for (auto p : base.game.pre(copy)) {
            if (!base.game.is_system(p)) continue;
            auto it = allowed.find({p, base.fold(copy)});
            if (it == allowed.end() || !it->second) return false;
        }
        return true;
    }
};

// Reachable part of the induced net.
struct StrategyNet {
    std::vector<PlaceId> places;      // reachable place copies (sorted)
    std::vector<TransId> transitions; // allowed transition copies fireable in the reachable part
};

StrategyNet reachable_induced_net(const BoundedStrategy& s, size_t limit = 1000000);

// Materializes the reachable induced net as a standalone game, keeping copy
// names as labels.
PetriGame strategy_subnet(const BoundedStrategy& s, const StrategyNet& net);

// ---------------------------------------------------------------------------
// Decoding QBF witnesses
// ---------------------------------------------------------------------------

// The witness must cover every strategy variable of `table` (the table of the
// encoding built from `unf`). Decisions at place copies unreachable in the
// induced net are canonicalized to refuse-all.
BoundedStrategy decode_strategy(const BoundedUnfolding& unf, const VariableTable& table,
                                const std::map<uint32_t, bool>& witness);

// ---------------------------------------------------------------------------
// Validation: winning conditions checked by exhaustive exploration of the
// induced net, independent of the QBF pipeline.
// ---------------------------------------------------------------------------

enum class Violation { kBadPlaceReached, kNondeterministic, kDeadlockNotTermination };

struct ValidationReport {
    bool winning = false;
    std::optional<Violation> violation;
    std::vector<Marking> witness; // play from the initial marking to the violation
    size_t explored = 0;
};

ValidationReport validate_strategy(const BoundedStrategy& s, size_t limit = 1000000);

// Loop-or-termination check for proof bound n: true iff no play of the
// induced net reaches n pairwise-distinct markings; equivalently every play
// either terminates before the horizon or repeats a marking within it.
struct LoopCheck {
    bool ok = false;
    std::vector<Marking> play;                        // witness play
    std::optional<std::pair<size_t, size_t>> loop;    // (j,k), 1-based, when the witness loops
};

LoopCheck check_loop_or_termination(const BoundedStrategy& s, uint32_t n);

// ---------------------------------------------------------------------------
// Distribution into local controllers (safe, concurrency-preserving games
// with exactly one environment process).
// ---------------------------------------------------------------------------

struct LocalController {
    TokenProcess process;
    PetriGame net; // projection of the strategy onto the process's places
};

std::vector<LocalController> distribute(const BoundedStrategy& s, size_t limit = 1000000);

// Parallel composition synchronizing on equally labeled transitions.
PetriGame compose_controllers(const std::vector<LocalController>& controllers);

// ---------------------------------------------------------------------------
// Serialization: unfolding format plus "allow <place> <original-transition>"
// lines; decisions not listed are refusals.
// ---------------------------------------------------------------------------

std::string serialize_strategy(const BoundedStrategy& s);
BoundedStrategy parse_strategy(const std::string& text, const PetriGame& original);
// Reconstructs the original game from the fold lines; enough for validation.
BoundedStrategy parse_strategy_standalone(const std::string& text);

} // namespace pgsynt
