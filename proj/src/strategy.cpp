#include "pgsynt/strategy.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pgsynt {

namespace {

std::vector<TransId> enabled_allowed(const BoundedStrategy& s, const Marking& m) {
    std::vector<TransId> out;
    for (auto t : enabled(s.base.game, m))
        if (s.allows(t)) out.push_back(t);
    return out;
}

} // namespace

StrategyNet reachable_induced_net(const BoundedStrategy& s, size_t limit) {
    std::set<PlaceId> places;
    std::set<TransId> transitions;
    std::unordered_set<Marking> seen;
    std::deque<Marking> queue;
    Marking init = s.base.game.initial_marking();
    seen.insert(init);
    queue.push_back(init);
    while (!queue.empty()) {
        Marking m = queue.front();
        queue.pop_front();
        for (auto p : m) places.insert(p);
        for (auto t : enabled_allowed(s, m)) {
            transitions.insert(t);
            Marking next = fire(s.base.game, m, t);
            if (seen.insert(next).second) {
                if (seen.size() > limit) throw LimitExceeded("induced net exploration limit");
                queue.push_back(next);
            }
        }
    }
    StrategyNet net;
    net.places.assign(places.begin(), places.end());
    net.transitions.assign(transitions.begin(), transitions.end());
    return net;
}

PetriGame strategy_subnet(const BoundedStrategy& s, const StrategyNet& net) {
    const PetriGame& g = s.base.game;
    PetriGame out;
    std::unordered_map<uint32_t, PlaceId> pm;
    for (auto p : net.places)
        pm[p.v] = out.add_place(g.place_name(p), g.is_system(p), g.is_bad(p), g.is_initial(p));
    for (auto t : net.transitions) {
        TransId nt = out.add_transition(g.trans_name(t));
        for (auto p : g.pre(t)) out.add_flow(pm.at(p.v), nt);
        for (auto p : g.post(t)) out.add_flow(nt, pm.at(p.v));
    }
    out.finalize();
    return out;
}

BoundedStrategy decode_strategy(const BoundedUnfolding& unf, const VariableTable& table,
                                const std::map<uint32_t, bool>& witness) {
    BoundedStrategy s;
    s.base = unf;
    for (const auto& [key, var] : table.strategy) {
        auto it = witness.find(var);
        if (it == witness.end())
            throw IncompleteWitness("witness misses strategy variable " + std::to_string(var));
        s.allowed[key] = it->second;
    }
    // Canonicalize: refuse everything at copies the induced net never reaches.
    StrategyNet net = reachable_induced_net(s);
    std::set<PlaceId> reachable(net.places.begin(), net.places.end());
    for (auto& [key, value] : s.allowed)
        if (!reachable.count(key.first)) value = false;
    return s;
}

ValidationReport validate_strategy(const BoundedStrategy& s, size_t limit) {
    const PetriGame& g = s.base.game;
    ValidationReport report;

    std::unordered_map<Marking, int64_t> parent; // -1 = initial
    std::vector<Marking> order;
    std::deque<size_t> queue;
    Marking init = g.initial_marking();
    parent.emplace(init, -1);
    order.push_back(init);
    queue.push_back(0);

    auto path_to = [&](const Marking& m) {
        std::vector<Marking> path{m};
        Marking cur = m;
        while (true) {
            int64_t idx = parent.at(cur);
            if (idx < 0) break;
            cur = order[static_cast<size_t>(idx)];
            path.push_back(cur);
        }
        std::reverse(path.begin(), path.end());
        return path;
    };

    while (!queue.empty()) {
        size_t mi = queue.front();
        queue.pop_front();
        Marking m = order[mi];
        ++report.explored;

        for (auto p : m) {
            if (g.is_bad(p)) {
                report.violation = Violation::kBadPlaceReached;
                report.witness = path_to(m);
                return report;
            }
        }

        std::vector<TransId> live = enabled_allowed(s, m);

        // Determinism: no two live transitions may share a system preset place.
        for (size_t a = 0; a < live.size(); ++a) {
            for (size_t b = a + 1; b < live.size(); ++b) {
                const auto& pa = g.pre(live[a]);
                for (auto p : g.pre(live[b])) {
                    if (g.is_system(p) && std::binary_search(pa.begin(), pa.end(), p)) {
                        report.violation = Violation::kNondeterministic;
                        report.witness = path_to(m);
                        return report;
                    }
                }
            }
        }

        // Deadlock avoidance: if the unfolding can still move, so must the
        // strategy.
        if (live.empty()) {
            if (!enabled(g, m).empty()) {
                report.violation = Violation::kDeadlockNotTermination;
                report.witness = path_to(m);
                return report;
            }
            continue;
        }

        for (auto t : live) {
            Marking next = fire(g, m, t);
            if (!parent.count(next)) {
                if (order.size() + 1 > limit) throw LimitExceeded("validation exploration limit");
                parent.emplace(next, static_cast<int64_t>(mi));
                order.push_back(std::move(next));
                queue.push_back(order.size() - 1);
            }
        }
    }
    report.winning = true;
    return report;
}

LoopCheck check_loop_or_termination(const BoundedStrategy& s, uint32_t n) {
    const PetriGame& g = s.base.game;
    LoopCheck result;
    if (n == 0) throw Error("bound must be positive");

    // Search for a play of n pairwise-distinct markings (a violation): depth
    // first over repetition-free plays.
    std::vector<Marking> path{g.initial_marking()};
    std::unordered_set<Marking> on_path{path[0]};

    std::function<bool(void)> dfs = [&]() -> bool {
        if (path.size() >= n) return true; // n distinct markings reached
        for (auto t : enabled_allowed(s, path.back())) {
            Marking next = fire(g, path.back(), t);
            if (on_path.count(next)) continue; // repeats: this play loops
            path.push_back(next);
            on_path.insert(next);
            if (dfs()) return true;
            on_path.erase(path.back());
            path.pop_back();
        }
        return false;
    };

    if (n >= 1 && dfs()) {
        result.ok = false;
        result.play = path;
        return result;
    }

    // All plays terminate or loop within the horizon; produce one as witness.
    result.ok = true;
    std::vector<Marking> play{g.initial_marking()};
    for (uint32_t step = 0; step + 1 < n + 1; ++step) {
        auto live = enabled_allowed(s, play.back());
        if (live.empty()) break; // terminated
        Marking next = fire(g, play.back(), live.front());
        auto hit = std::find(play.begin(), play.end(), next);
        play.push_back(next);
        if (hit != play.end() - 1) {
            result.loop = {static_cast<size_t>(hit - play.begin()) + 1, play.size()};
            break;
        }
    }
    result.play = std::move(play);
    return result;
}

// ---------------------------------------------------------------------------
// Distribution
// ---------------------------------------------------------------------------

std::vector<LocalController> distribute(const BoundedStrategy& s, size_t limit) {
    std::vector<TokenProcess> procs;
    try {
        procs = infer_processes(s.base.original);
    } catch (const NotConcurrencyPreserving& e) {
        throw NotDistributable(std::string("not concurrency-preserving: ") + e.what());
    } catch (const AmbiguousProcessAssignment& e) {
        throw NotDistributable(std::string("no token process partition: ") + e.what());
    }
    size_t env_procs = 0;
    for (const auto& p : procs) env_procs += p.environment ? 1 : 0;
    if (env_procs != 1)
        throw NotDistributable("expected exactly one environment process, found " +
                               std::to_string(env_procs));

    StrategyNet net = reachable_induced_net(s, limit);
    const PetriGame& g = s.base.game;

    std::vector<LocalController> out;
    for (const auto& proc : procs) {
        std::set<PlaceId> proc_places(proc.places.begin(), proc.places.end());
        LocalController lc;
        lc.process = proc;
        std::unordered_map<uint32_t, PlaceId> pm;
        for (auto p : net.places) {
            if (!proc_places.count(s.base.fold(p))) continue;
            pm[p.v] = lc.net.add_place(g.place_name(p), g.is_system(p), g.is_bad(p),
                                       g.is_initial(p));
        }
        for (auto t : net.transitions) {
            bool incident = false;
            for (auto p : g.pre(t)) incident = incident || pm.count(p.v);
            for (auto p : g.post(t)) incident = incident || pm.count(p.v);
            if (!incident) continue;
            TransId nt = lc.net.add_transition(g.trans_name(t));
            for (auto p : g.pre(t))
                if (pm.count(p.v)) lc.net.add_flow(pm.at(p.v), nt);
            for (auto p : g.post(t))
                if (pm.count(p.v)) lc.net.add_flow(nt, pm.at(p.v));
        }
        lc.net.finalize();
        out.push_back(std::move(lc));
    }
    return out;
}

PetriGame compose_controllers(const std::vector<LocalController>& controllers) {
    // Collect places (disjoint across controllers by construction) and group
    // transitions by label.
    std::map<std::string, std::tuple<bool, bool, bool>> places; // name -> (system,bad,initial)
    std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>> trans;
    for (const auto& lc : controllers) {
        const PetriGame& n = lc.net;
        for (uint32_t p = 0; p < n.num_places(); ++p) {
            PlaceId id{p};
            places[n.place_name(id)] = {n.is_system(id), n.is_bad(id), n.is_initial(id)};
        }
        for (uint32_t t = 0; t < n.num_transitions(); ++t) {
            TransId id{t};
            auto& [pre, post] = trans[n.trans_name(id)];
            for (auto p : n.pre(id)) pre.insert(n.place_name(p));
            for (auto p : n.post(id)) post.insert(n.place_name(p));
        }
    }
    PetriGame g;
    for (const auto& [name, flags] : places)
        g.add_place(name, std::get<0>(flags), std::get<1>(flags), std::get<2>(flags));
    for (const auto& [name, flows] : trans) {
        TransId t = g.add_transition(name);
        for (const auto& p : flows.first) g.add_flow(*g.find_place(p), t);
        for (const auto& p : flows.second) g.add_flow(t, *g.find_place(p));
    }
    g.finalize();
    return g;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string serialize_strategy(const BoundedStrategy& s) {
    std::ostringstream out;
    out << serialize_unfolding(s.base);
    for (const auto& [key, value] : s.allowed) {
        if (!value) continue;
        out << "allow " << s.base.game.place_name(key.first) << " "
            << s.base.original.trans_name(key.second) << "\n";
    }
    return out.str();
}

namespace {

BoundedStrategy parse_strategy_text(const std::string& text, const PetriGame& original) {
    std::istringstream in(text);
    std::ostringstream unf_text;
    std::vector<std::pair<std::string, std::string>> allows;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "allow") {
            std::string place, trans;
            ls >> place >> trans;
            if (place.empty() || trans.empty()) throw SemanticError("malformed allow line: " + line);
            allows.emplace_back(place, trans);
        } else {
            unf_text << line << "\n";
        }
    }
    BoundedStrategy s;
    s.base = parse_unfolding(unf_text.str(), original);
    // Default: every decision point refuses; allow lines turn pairs on.
    const PetriGame& g = s.base.game;
    for (uint32_t pv = 0; pv < g.num_places(); ++pv) {
        PlaceId p{pv};
        if (!g.is_system(p)) continue;
        for (auto t : g.place_post(p)) s.allowed[{p, s.base.fold(t)}] = false;
    }
    for (const auto& [pname, tname] : allows) {
        auto p = g.find_place(pname);
        if (!p) throw SemanticError("allow line names unknown place '" + pname + "'");
        auto t = original.find_transition(tname);
        if (!t) throw SemanticError("allow line names unknown transition '" + tname + "'");
        if (!g.is_system(*p))
            throw SemanticError("allow line targets environment place '" + pname + "'");
        s.allowed[{*p, *t}] = true;
    }
    return s;
}

} // namespace

BoundedStrategy parse_strategy(const std::string& text, const PetriGame& original) {
    return parse_strategy_text(text, original);
}

BoundedStrategy parse_strategy_standalone(const std::string& text) {
    // First pass: reconstruct the original game skeleton from the fold lines
    // and the copy net.
    std::istringstream in(text);
    std::ostringstream unf_text;
    std::string line;
    std::map<std::string, std::string> fold_of; // copy name -> original name
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "fold") {
            std::string a, arrow, b;
            ls >> a >> arrow >> b;
            fold_of[a] = b;
        }
        if (kw != "allow") unf_text << line << "\n";
    }
    // Parse the copy net alone (fold/bound lines are ignored by parse_game).
    std::istringstream in2(unf_text.str());
    std::ostringstream net_only;
    while (std::getline(in2, line)) {
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "fold" || kw == "bound") continue;
        net_only << line << "\n";
    }
    PetriGame copies = parse_game(net_only.str());

    PetriGame original;
    std::set<std::string> declared;
    for (uint32_t p = 0; p < copies.num_places(); ++p) {
        PlaceId id{p};
        auto it = fold_of.find(copies.place_name(id));
        if (it == fold_of.end())
            throw SemanticError("place '" + copies.place_name(id) + "' lacks a fold line");
        if (declared.insert(it->second).second)
            original.add_place(it->second, copies.is_system(id), copies.is_bad(id),
                               copies.is_initial(id));
    }
    for (uint32_t t = 0; t < copies.num_transitions(); ++t) {
        TransId id{t};
        auto it = fold_of.find(copies.trans_name(id));
        if (it == fold_of.end())
            throw SemanticError("transition '" + copies.trans_name(id) + "' lacks a fold line");
        if (declared.insert(it->second).second) {
            TransId ot = original.add_transition(it->second);
            for (auto p : copies.pre(id)) original.add_flow(*original.find_place(fold_of.at(copies.place_name(p))), ot);
            for (auto p : copies.post(id)) original.add_flow(ot, *original.find_place(fold_of.at(copies.place_name(p))));
        }
    }
    original.finalize();
    return parse_strategy_text(text, original);
}

} // namespace pgsynt
