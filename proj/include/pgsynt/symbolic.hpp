#pragma once

#include "pgsynt/strategy.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace pgsynt {

struct Unsupported : Error { using Error::Error; };
struct StateBudgetExceeded : Error { using Error::Error; };
struct TranslateFailed : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Reduction to a two-player safety game over a finite graph. States are
// decorated cuts: the environment token's place plus one record per system
// token carrying a top flag and a commitment set (subset of the place's
// postset). States whose system players progressed maximally (mcuts) belong
// to Player 1; everything else, including commitment choices, belongs to
// Player 0.
// ---------------------------------------------------------------------------

struct TokenRecord {
    PlaceId place;
    bool top = false;       // must re-choose its commitment before any firing
    bool committed = false; // commitment below is meaningful
    uint64_t commitment = 0; // bitmask over place_post(place), ascending

    friend auto operator<=>(const TokenRecord&, const TokenRecord&) = default;
};

enum class Owner : uint8_t { kPlayer0, kPlayer1 };
enum class BadKind : uint8_t { kNone, kNondeterministic, kBadPlace, kDeadlock };

struct GGState {
    PlaceId env_place;
    std::vector<TokenRecord> system; // sorted by place id
    Owner owner = Owner::kPlayer0;
    BadKind bad = BadKind::kNone;
    bool pending = false; // some record still needs a commitment

    friend bool operator==(const GGState& a, const GGState& b) {
        return a.env_place == b.env_place && a.system == b.system;
    }
};

struct GGEdge {
    enum Kind : uint8_t { kResolve, kFire } kind = kResolve;
    TransId trans{UINT32_MAX}; // kFire only
    // commitments chosen along this edge, sorted by place id
    std::vector<std::pair<PlaceId, uint64_t>> assignments;
    uint32_t target = 0;

    // label order for the deterministic Player-0 tie-break
    friend bool operator<(const GGEdge& a, const GGEdge& b) {
        auto ka = std::make_tuple(static_cast<int>(a.kind), a.trans.v, a.assignments);
        auto kb = std::make_tuple(static_cast<int>(b.kind), b.trans.v, b.assignments);
        return ka < kb;
    }
};

struct GameGraph {
    PetriGame game;
    std::vector<TokenProcess> processes;
    std::vector<GGState> states;
    std::vector<std::vector<GGEdge>> edges; // sorted per state
    uint32_t initial = 0;

    Marking cut_of(uint32_t state) const;
};

struct SymbolicOptions {
    size_t state_budget = 1000000;
    size_t max_commitment_choices = 1u << 16; // per resolution edge fan-out
};

// Supported: safe, concurrency-preserving, exactly one environment process
// (with exactly one env place initially marked), and no cycle of system-only
// transitions over the reachable markings.
struct SupportReport {
    bool ok = false;
    std::string reason;
    std::vector<TokenProcess> processes;
};

SupportReport check_supported(const PetriGame& game, size_t explore_limit = 200000);

GameGraph build_game_graph(const PetriGame& game, const SymbolicOptions& opts = {});

// ---------------------------------------------------------------------------
// Safety solving by attractor iteration: Player 1 attracts to the bad
// states; Player 0 wins on the complement. The parallel version runs the
// per-wave predecessor scans with OpenMP; the serial version is the
// reference implementation. Both compute the same region and the same
// lexicographically-smallest positional choices.
// ---------------------------------------------------------------------------

struct SafetySolution {
    std::vector<char> winning;   // per state
    std::vector<int32_t> choice; // per Player-0 state: index into edges, else -1
};

std::optional<SafetySolution> solve_safety(const GameGraph& g);
std::optional<SafetySolution> solve_safety_serial(const GameGraph& g);

// ---------------------------------------------------------------------------
// Strategy translation: walks the chosen sub-graph, materializing one place
// copy per causal history encountered, and emits the commitment sets as
// allow-decisions over the resulting unfolding.
// ---------------------------------------------------------------------------

struct TranslateOptions {
    size_t config_budget = 1000000;
    bool validate = true; // re-check the result and fail loudly if not winning
};

BoundedStrategy translate_strategy(const PetriGame& game, const GameGraph& g,
                                   const SafetySolution& sol, const TranslateOptions& opts = {});

// ---------------------------------------------------------------------------
// BDD variable-count metric: 2*(log2|P_E| + sum_i(log2|P_Si| + |T_i| + 2))
// with T_i the union of the postsets of process i's places, logs rounded up.
// ---------------------------------------------------------------------------

size_t bdd_variable_estimate(const PetriGame& game, const std::vector<TokenProcess>& processes);

// One state per line, stable ordering; for debugging and golden tests.
std::string dump_game_graph(const GameGraph& g);

} // namespace pgsynt
