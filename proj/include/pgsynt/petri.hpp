#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pgsynt {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    int line = 0;
    int col = 0;
    ParseError(const std::string& msg, int line_, int col_)
        : Error("parse error at " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
};

struct SemanticError : Error { using Error::Error; };
struct NotEnabled : Error { using Error::Error; };
struct UnsafeFiring : Error { using Error::Error; };
struct LimitExceeded : Error { using Error::Error; };
struct NotConcurrencyPreserving : Error { using Error::Error; };
struct AmbiguousProcessAssignment : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Identifiers. Places and transitions are interned; ids are dense indices
// into the owning game's tables.
// ---------------------------------------------------------------------------

struct PlaceId {
    uint32_t v = 0;
    friend constexpr bool operator==(PlaceId a, PlaceId b) { return a.v == b.v; }
    friend constexpr auto operator<=>(PlaceId a, PlaceId b) { return a.v <=> b.v; }
};

struct TransId {
    uint32_t v = 0;
    friend constexpr bool operator==(TransId a, TransId b) { return a.v == b.v; }
    friend constexpr auto operator<=>(TransId a, TransId b) { return a.v <=> b.v; }
};

// A marking is a canonical (sorted, duplicate-free) set of places. Set
// semantics encode 1-safety.
using Marking = std::vector<PlaceId>;

Marking make_marking(std::vector<PlaceId> places);
bool marking_contains(const Marking& m, PlaceId p);

// ---------------------------------------------------------------------------
// PetriGame: a safe Petri net with places split into system/environment and
// a set of bad places as the safety objective.
// ---------------------------------------------------------------------------

class PetriGame {
public:
    PlaceId add_place(const std::string& name, bool system, bool bad = false, bool initial = false);
    TransId add_transition(const std::string& name);
    void add_flow(PlaceId p, TransId t);   // p -> t (p joins preset of t)
    void add_flow(TransId t, PlaceId p);   // t -> p (p joins postset of t)

    // Sorts flow lists, builds reverse indices and checks structural
    // invariants. Must be called once construction is done.
    void finalize();

    size_t num_places() const { return place_name_.size(); }
    size_t num_transitions() const { return trans_name_.size(); }

    const std::string& place_name(PlaceId p) const { return place_name_[p.v]; }
    const std::string& trans_name(TransId t) const { return trans_name_[t.v]; }
    bool is_system(PlaceId p) const { return place_system_[p.v]; }
    bool is_env(PlaceId p) const { return !place_system_[p.v]; }
    bool is_bad(PlaceId p) const { return place_bad_[p.v]; }
    bool is_initial(PlaceId p) const { return place_initial_[p.v]; }

    const std::vector<PlaceId>& pre(TransId t) const { return pre_[t.v]; }
    const std::vector<PlaceId>& post(TransId t) const { return post_[t.v]; }
    const std::vector<TransId>& place_pre(PlaceId p) const { return place_pre_[p.v]; }
    const std::vector<TransId>& place_post(PlaceId p) const { return place_post_[p.v]; }

    // True iff some place of the transition's preset is a system place.
    bool has_system_preset(TransId t) const;
    // True iff neither preset nor postset touches an environment place.
    bool is_system_only(TransId t) const;

    Marking initial_marking() const;

    std::optional<PlaceId> find_place(const std::string& name) const;
    std::optional<TransId> find_transition(const std::string& name) const;

    bool finalized() const { return finalized_; }

private:
    std::vector<std::string> place_name_;
    std::vector<bool> place_system_, place_bad_, place_initial_;
    std::vector<std::vector<TransId>> place_pre_, place_post_;

    std::vector<std::string> trans_name_;
    std::vector<std::vector<PlaceId>> pre_, post_;

    std::map<std::string, uint32_t> place_index_, trans_index_;
    bool finalized_ = false;
};

// ---------------------------------------------------------------------------
// Firing semantics. All functions are pure; UnsafeFiring is raised loudly
// instead of silently truncating token counts.
// ---------------------------------------------------------------------------

bool is_enabled(const PetriGame& g, const Marking& m, TransId t);
std::vector<TransId> enabled(const PetriGame& g, const Marking& m);
Marking fire(const PetriGame& g, const Marking& m, TransId t);

// Breadth-first closure of fire() from the initial marking, exploring
// transitions in sorted id order. Throws LimitExceeded when more than
// `limit` distinct markings are found.
std::vector<Marking> reachable_markings(const PetriGame& g, size_t limit);

// ---------------------------------------------------------------------------
// Token processes: partition of the places occupied by reachable markings
// such that every reachable marking holds at most one place per process.
// ---------------------------------------------------------------------------

struct TokenProcess {
    int index = 0;
    bool environment = false;          // contains at least one env place
    std::vector<PlaceId> places;       // sorted
};

// Propagates process identity along flows from the initial marking and
// verifies the result against the reachable markings (up to verify_limit).
std::vector<TokenProcess> infer_processes(const PetriGame& g, size_t verify_limit = 200000);

// ---------------------------------------------------------------------------
// Textual game format (line oriented, '#' comments):
//   place <id> [system|env] [bad] [initial]
//   transition <id>
//   flow <place-id> -> <transition-id>
//   flow <transition-id> -> <place-id>
// Declarations must appear in the order places, transitions, flows.
// ---------------------------------------------------------------------------

PetriGame parse_game(const std::string& text);
std::string serialize_game(const PetriGame& g);

} // namespace pgsynt

template <> struct std::hash<pgsynt::PlaceId> {
    size_t operator()(pgsynt::PlaceId p) const noexcept { return std::hash<uint32_t>{}(p.v); }
};
template <> struct std::hash<pgsynt::TransId> {
    size_t operator()(pgsynt::TransId t) const noexcept { return std::hash<uint32_t>{}(t.v); }
};
template <> struct std::hash<pgsynt::Marking> {
    size_t operator()(const pgsynt::Marking& m) const noexcept {
        size_t h = 0xcbf29ce484222325ull;
        for (auto p : m) h = (h ^ p.v) * 0x100000001b3ull;
        return h;
    }
};
