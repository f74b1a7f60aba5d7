#include "pgsynt/petri.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pgsynt {

Marking make_marking(std::vector<PlaceId> places) {
    std::sort(places.begin(), places.end());
    places.erase(std::unique(places.begin(), places.end()), places.end());
    return places;
}

bool marking_contains(const Marking& m, PlaceId p) {
    return std::binary_search(m.begin(), m.end(), p);
}

// ---------------------------------------------------------------------------
// PetriGame construction
// ---------------------------------------------------------------------------

PlaceId PetriGame::add_place(const std::string& name, bool system, bool bad, bool initial) {
    if (place_index_.count(name) || trans_index_.count(name))
        throw SemanticError("duplicate identifier '" + name + "'");
    uint32_t idx = static_cast<uint32_t>(place_name_.size());
    place_index_[name] = idx;
    place_name_.push_back(name);
    place_system_.push_back(system);
    place_bad_.push_back(bad);
    place_initial_.push_back(initial);
    place_pre_.emplace_back();
    place_post_.emplace_back();
    finalized_ = false;
    return PlaceId{idx};
}

TransId PetriGame::add_transition(const std::string& name) {
    if (place_index_.count(name) || trans_index_.count(name))
        throw SemanticError("duplicate identifier '" + name + "'");
    uint32_t idx = static_cast<uint32_t>(trans_name_.size());
    trans_index_[name] = idx;
    trans_name_.push_back(name);
    pre_.emplace_back();
    post_.emplace_back();
    finalized_ = false;
    return TransId{idx};
}

void PetriGame::add_flow(PlaceId p, TransId t) {
    if (p.v >= num_places() || t.v >= num_transitions())
        throw SemanticError("flow endpoint out of range");
    pre_[t.v].push_back(p);
    place_post_[p.v].push_back(t);
    finalized_ = false;
}

void PetriGame::add_flow(TransId t, PlaceId p) {
    if (p.v >= num_places() || t.v >= num_transitions())
        throw SemanticError("flow endpoint out of range");
    post_[t.v].push_back(p);
    place_pre_[p.v].push_back(t);
    finalized_ = false;
}

static void sort_unique_places(std::vector<PlaceId>& v, const char* what, const std::string& name) {
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end())
        throw SemanticError(std::string("duplicate ") + what + " flow for '" + name + "'");
}

void PetriGame::finalize() {
    for (uint32_t t = 0; t < num_transitions(); ++t) {
        sort_unique_places(pre_[t], "preset", trans_name_[t]);
        sort_unique_places(post_[t], "postset", trans_name_[t]);
        if (pre_[t].empty())
            throw SemanticError("transition '" + trans_name_[t] + "' has empty preset");
    }
    for (uint32_t p = 0; p < num_places(); ++p) {
        std::sort(place_pre_[p].begin(), place_pre_[p].end());
        std::sort(place_post_[p].begin(), place_post_[p].end());
        place_pre_[p].erase(std::unique(place_pre_[p].begin(), place_pre_[p].end()), place_pre_[p].end());
        place_post_[p].erase(std::unique(place_post_[p].begin(), place_post_[p].end()), place_post_[p].end());
    }
    finalized_ = true;
}

bool PetriGame::has_system_preset(TransId t) const {
    for (auto p : pre_[t.v])
        if (is_system(p)) return true;
    return false;
}

bool PetriGame::is_system_only(TransId t) const {
    for (auto p : pre_[t.v])
        if (is_env(p)) return false;
    for (auto p : post_[t.v])
        if (is_env(p)) return false;
    return true;
}

Marking PetriGame::initial_marking() const {
    Marking m;
    for (uint32_t p = 0; p < num_places(); ++p)
        if (place_initial_[p]) m.push_back(PlaceId{p});
    return m;
}

std::optional<PlaceId> PetriGame::find_place(const std::string& name) const {
    auto it = place_index_.find(name);
    if (it == place_index_.end()) return std::nullopt;
    return PlaceId{it->second};
}

std::optional<TransId> PetriGame::find_transition(const std::string& name) const {
    auto it = trans_index_.find(name);
    if (it == trans_index_.end()) return std::nullopt;
    return TransId{it->second};
}

// ---------------------------------------------------------------------------
// Firing semantics
// ---------------------------------------------------------------------------

bool is_enabled(const PetriGame& g, const Marking& m, TransId t) {
    for (auto p : g.pre(t))
        if (!marking_contains(m, p)) return false;
    return true;
}

std::vector<TransId> enabled(const PetriGame& g, const Marking& m) {
    std::vector<TransId> out;
    for (uint32_t t = 0; t < g.num_transitions(); ++t)
        if (is_enabled(g, m, TransId{t})) out.push_back(TransId{t});
    return out;
}

Marking fire(const PetriGame& g, const Marking& m, TransId t) {
    if (!is_enabled(g, m, t))
        throw NotEnabled("transition '" + g.trans_name(t) + "' is not enabled");
    const auto& pre = g.pre(t);
    const auto& post = g.post(t);
    for (auto p : post) {
        if (marking_contains(m, p) && !std::binary_search(pre.begin(), pre.end(), p))
            throw UnsafeFiring("firing '" + g.trans_name(t) + "' would put a second token on '" +
                               g.place_name(p) + "'");
    }
    Marking out;
    out.reserve(m.size() + post.size());
    std::set_difference(m.begin(), m.end(), pre.begin(), pre.end(), std::back_inserter(out));
    for (auto p : post) out.push_back(p);
    return make_marking(std::move(out));
}

std::vector<Marking> reachable_markings(const PetriGame& g, size_t limit) {
    if (limit == 0) throw LimitExceeded("limit must be positive");
    std::vector<Marking> found;
    std::unordered_set<Marking> seen;
    std::deque<size_t> queue;
    found.push_back(g.initial_marking());
    seen.insert(found[0]);
    queue.push_back(0);
    while (!queue.empty()) {
        Marking m = found[queue.front()];
        queue.pop_front();
        for (auto t : enabled(g, m)) {
            Marking next = fire(g, m, t);
            if (seen.insert(next).second) {
                if (found.size() + 1 > limit)
                    throw LimitExceeded("more than " + std::to_string(limit) + " reachable markings");
                found.push_back(std::move(next));
                queue.push_back(found.size() - 1);
            }
        }
    }
    return found;
}

// ---------------------------------------------------------------------------
// Token processes
// ---------------------------------------------------------------------------

std::vector<TokenProcess> infer_processes(const PetriGame& g, size_t verify_limit) {
    for (uint32_t t = 0; t < g.num_transitions(); ++t)
        if (g.pre(TransId{t}).size() != g.post(TransId{t}).size())
            throw NotConcurrencyPreserving("transition '" + g.trans_name(TransId{t}) +
                                           "' has |preset| != |postset|");

    constexpr int kUnassigned = -1;
    std::vector<int> color(g.num_places(), kUnassigned);
    Marking init = g.initial_marking();
    int next_color = 0;
    for (auto p : init) color[p.v] = next_color++;

    // Propagate along transitions whose preset is fully colored. Postset
    // places inherit the preset colors: self-loop places keep theirs, already
    // colored postset places consume a matching color, the rest pair up in
    // sorted id order.
    bool changed = true;
    while (changed) {
        changed = false;
        for (uint32_t tv = 0; tv < g.num_transitions(); ++tv) {
            TransId t{tv};
            const auto& pre = g.pre(t);
            const auto& post = g.post(t);
            bool ready = true;
            for (auto p : pre)
                if (color[p.v] == kUnassigned) { ready = false; break; }
            if (!ready) continue;

            std::vector<int> avail;
            for (auto p : pre)
                if (!std::binary_search(post.begin(), post.end(), p)) avail.push_back(color[p.v]);
            std::vector<PlaceId> open;
            for (auto q : post) {
                if (std::binary_search(pre.begin(), pre.end(), q)) continue; // keeps its color
                if (color[q.v] != kUnassigned) {
                    auto it = std::find(avail.begin(), avail.end(), color[q.v]);
                    if (it == avail.end())
                        throw AmbiguousProcessAssignment(
                            "place '" + g.place_name(q) + "' reachable under two process identities");
                    avail.erase(it);
                } else {
                    open.push_back(q);
                }
            }
            std::sort(avail.begin(), avail.end());
            std::sort(open.begin(), open.end());
            for (size_t i = 0; i < open.size(); ++i) {
                color[open[i].v] = avail[i];
                changed = true;
            }
        }
    }

    // Verify the partition against the reachable markings.
    for (const auto& m : reachable_markings(g, verify_limit)) {
        std::vector<char> used(static_cast<size_t>(next_color), 0);
        for (auto p : m) {
            int c = color[p.v];
            if (c == kUnassigned || used[static_cast<size_t>(c)])
                throw AmbiguousProcessAssignment("reachable marking breaks the process partition at '" +
                                                 g.place_name(p) + "'");
            used[static_cast<size_t>(c)] = 1;
        }
    }

    std::vector<TokenProcess> procs(static_cast<size_t>(next_color));
    for (int c = 0; c < next_color; ++c) procs[static_cast<size_t>(c)].index = c;
    for (uint32_t p = 0; p < g.num_places(); ++p) {
        if (color[p] == kUnassigned) continue;
        auto& proc = procs[static_cast<size_t>(color[p])];
        proc.places.push_back(PlaceId{p});
        if (g.is_env(PlaceId{p})) proc.environment = true;
    }
    return procs;
}

// ---------------------------------------------------------------------------
// Parsing / serialization
// ---------------------------------------------------------------------------

namespace {

struct Token {
    std::string text;
    int col;
};

std::vector<Token> tokenize_line(const std::string& line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) { ++i; continue; }
        if (line[i] == '#') break;
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#')
            ++i;
        out.push_back({line.substr(start, i - start), static_cast<int>(start + 1)});
    }
    return out;
}

bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '\'') return false;
    return true;
}

} // namespace

PetriGame parse_game(const std::string& text) {
    PetriGame g;
    enum Section { kPlaces, kTransitions, kFlows };
    Section section = kPlaces;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = tokenize_line(line);
        if (toks.empty()) continue;
        const std::string& kw = toks[0].text;

        if (kw == "place") {
            if (section != kPlaces)
                throw ParseError("place declared after transitions or flows", lineno, toks[0].col);
            if (toks.size() < 2) throw ParseError("missing place identifier", lineno, toks[0].col);
            if (!valid_identifier(toks[1].text))
                throw ParseError("invalid identifier '" + toks[1].text + "'", lineno, toks[1].col);
            bool system = false, bad = false, initial = false;
            size_t i = 2;
            if (i < toks.size() && (toks[i].text == "system" || toks[i].text == "env")) {
                system = toks[i].text == "system";
                ++i;
            }
            if (i < toks.size() && toks[i].text == "bad") { bad = true; ++i; }
            if (i < toks.size() && toks[i].text == "initial") { initial = true; ++i; }
            if (i != toks.size())
                throw ParseError("unexpected token '" + toks[i].text + "'", lineno, toks[i].col);
            try {
                g.add_place(toks[1].text, system, bad, initial);
            } catch (const SemanticError& e) {
                throw ParseError(e.what(), lineno, toks[1].col);
            }
        } else if (kw == "transition") {
            if (section == kFlows)
                throw ParseError("transition declared after flows", lineno, toks[0].col);
            section = kTransitions;
            if (toks.size() != 2) throw ParseError("expected: transition <id>", lineno, toks[0].col);
            if (!valid_identifier(toks[1].text))
                throw ParseError("invalid identifier '" + toks[1].text + "'", lineno, toks[1].col);
            try {
                g.add_transition(toks[1].text);
            } catch (const SemanticError& e) {
                throw ParseError(e.what(), lineno, toks[1].col);
            }
        } else if (kw == "flow") {
            section = kFlows;
            if (toks.size() != 4 || toks[2].text != "->")
                throw ParseError("expected: flow <id> -> <id>", lineno, toks[0].col);
            const std::string& a = toks[1].text;
            const std::string& b = toks[3].text;
            auto pa = g.find_place(a);
            auto ta = g.find_transition(a);
            if (pa) {
                auto tb = g.find_transition(b);
                if (!tb)
                    throw SemanticError("undeclared transition '" + b + "' in flow (line " +
                                        std::to_string(lineno) + ")");
                g.add_flow(*pa, *tb);
            } else if (ta) {
                auto pb = g.find_place(b);
                if (!pb)
                    throw SemanticError("undeclared place '" + b + "' in flow (line " +
                                        std::to_string(lineno) + ")");
                g.add_flow(*ta, *pb);
            } else {
                throw SemanticError("undeclared identifier '" + a + "' in flow (line " +
                                    std::to_string(lineno) + ")");
            }
        } else {
            throw ParseError("unknown declaration '" + kw + "'", lineno, toks[0].col);
        }
    }
    g.finalize();
    return g;
}

std::string serialize_game(const PetriGame& g) {
    std::ostringstream out;
    for (uint32_t p = 0; p < g.num_places(); ++p) {
        PlaceId id{p};
        out << "place " << g.place_name(id) << (g.is_system(id) ? " system" : " env");
        if (g.is_bad(id)) out << " bad";
        if (g.is_initial(id)) out << " initial";
        out << "\n";
    }
    for (uint32_t t = 0; t < g.num_transitions(); ++t)
        out << "transition " << g.trans_name(TransId{t}) << "\n";
    for (uint32_t t = 0; t < g.num_transitions(); ++t) {
        TransId id{t};
        for (auto p : g.pre(id))
            out << "flow " << g.place_name(p) << " -> " << g.trans_name(id) << "\n";
        for (auto p : g.post(id))
            out << "flow " << g.trans_name(id) << " -> " << g.place_name(p) << "\n";
    }
    return out.str();
}

} // namespace pgsynt
