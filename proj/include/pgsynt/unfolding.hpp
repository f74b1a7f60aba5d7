#pragma once

#include "pgsynt/petri.hpp"

namespace pgsynt {

// ---------------------------------------------------------------------------
// Bounded unfolding: a Petri game in its own right plus fold maps back onto
// the original game and the memory bound b. Each original place receives at
// most b copies; copy 0 keeps the original name, further copies are named
// <original>'k.
// ---------------------------------------------------------------------------

struct BoundedUnfolding {
    PetriGame game;                       // the unfolded net
    PetriGame original;                   // the game it folds onto
    std::vector<PlaceId> fold_place;      // copy place -> original place
    std::vector<TransId> fold_transition; // copy transition -> original transition
    size_t bound = 1;

    PlaceId fold(PlaceId p) const { return fold_place[p.v]; }
    TransId fold(TransId t) const { return fold_transition[t.v]; }
};

struct UnfoldOptions {
    size_t node_budget = 100000;     // places + transitions of the unfolding
    size_t marking_budget = 1000000; // explored markings during construction
};

// Builds the bounded unfolding by breadth-first exploration of the game.
// A fresh copy of a place is created for each distinct incoming transition
// copy until the place has b copies; once the bound is hit, further incoming
// flows are routed to the copy with the smallest index.
BoundedUnfolding bounded_unfolding(const PetriGame& game, size_t b,
                                   const UnfoldOptions& opts = {});

// Removes every place and transition that cannot occur within the first
// n-1 firing steps of unrestricted play. Idempotent.
BoundedUnfolding prune_unreachable(const BoundedUnfolding& unf, size_t n);

// Serialization: the game format plus one "fold <copy> -> <original>" line
// per node.
std::string serialize_unfolding(const BoundedUnfolding& unf);
BoundedUnfolding parse_unfolding(const std::string& text, const PetriGame& original);

} // namespace pgsynt
