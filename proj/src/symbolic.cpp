#include "pgsynt/symbolic.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace pgsynt {

namespace {

struct StateKey {
    PlaceId env;
    std::vector<TokenRecord> system;
    bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
    size_t operator()(const StateKey& k) const {
        size_t h = std::hash<uint32_t>{}(k.env.v);
        for (const auto& r : k.system) {
            h = h * 0x9e3779b97f4a7c15ull + r.place.v;
            h = h * 0x9e3779b97f4a7c15ull + (r.top ? 2 : 0) + (r.committed ? 1 : 0);
            h = h * 0x9e3779b97f4a7c15ull + r.commitment;
        }
        return h;
    }
};

} // namespace

Marking GameGraph::cut_of(uint32_t state) const {
    Marking m;
    m.push_back(states[state].env_place);
    for (const auto& r : states[state].system) m.push_back(r.place);
    return make_marking(std::move(m));
}

// ---------------------------------------------------------------------------
// check_supported
// ---------------------------------------------------------------------------

SupportReport check_supported(const PetriGame& game, size_t explore_limit) {
    SupportReport rep;
    try {
        rep.processes = infer_processes(game, explore_limit);
    } catch (const NotConcurrencyPreserving& e) {
        rep.reason = std::string("not concurrency-preserving: ") + e.what();
        return rep;
    } catch (const AmbiguousProcessAssignment& e) {
        rep.reason = std::string("no token process partition: ") + e.what();
        return rep;
    } catch (const UnsafeFiring& e) {
        rep.reason = std::string("not safe: ") + e.what();
        return rep;
    }

    size_t env_procs = 0;
    for (const auto& p : rep.processes) env_procs += p.environment ? 1 : 0;
    if (env_procs != 1) {
        rep.reason = "need exactly one environment process, found " + std::to_string(env_procs);
        return rep;
    }
    size_t env_initial = 0;
    for (auto p : game.initial_marking()) env_initial += game.is_env(p) ? 1 : 0;
    if (env_initial != 1) {
        rep.reason = "need exactly one environment token, found " + std::to_string(env_initial);
        return rep;
    }
    for (const auto& proc : rep.processes) {
        bool has_env = false, has_sys = false;
        for (auto p : proc.places) (game.is_env(p) ? has_env : has_sys) = true;
        if (has_env && has_sys) {
            rep.reason = "a token process mixes system and environment places";
            return rep;
        }
    }

    // No infinite progress without the environment: the reachable-marking
    // graph restricted to system-only transitions must be acyclic.
    std::vector<Marking> markings = reachable_markings(game, explore_limit);
    std::unordered_map<Marking, uint32_t> index;
    for (uint32_t i = 0; i < markings.size(); ++i) index[markings[i]] = i;
    std::vector<std::vector<uint32_t>> succ(markings.size());
    for (uint32_t i = 0; i < markings.size(); ++i)
        for (auto t : enabled(game, markings[i]))
            if (game.is_system_only(t)) succ[i].push_back(index.at(fire(game, markings[i], t)));

    std::vector<int8_t> color(markings.size(), 0); // 0 fresh, 1 on stack, 2 done
    std::vector<std::pair<uint32_t, size_t>> stack;
    for (uint32_t root = 0; root < markings.size(); ++root) {
        if (color[root]) continue;
        stack.push_back({root, 0});
        color[root] = 1;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            if (next < succ[node].size()) {
                uint32_t child = succ[node][next++];
                if (color[child] == 1) {
                    rep.reason = "system players can progress in a cycle without the environment";
                    return rep;
                }
                if (color[child] == 0) {
                    color[child] = 1;
                    stack.push_back({child, 0});
                }
            } else {
                color[node] = 2;
                stack.pop_back();
            }
        }
    }

    rep.ok = true;
    return rep;
}

// ---------------------------------------------------------------------------
// build_game_graph
// ---------------------------------------------------------------------------

namespace {

// Enabled original transitions whose system preset places all commit to them.
std::vector<TransId> chosen_transitions(const PetriGame& g, const GGState& s,
                                        const std::vector<TransId>& enabled_ts) {
    std::vector<TransId> out;
    for (auto t : enabled_ts) {
        bool ok = true;
        for (auto p : g.pre(t)) {
            if (!g.is_system(p)) continue;
            auto it = std::lower_bound(s.system.begin(), s.system.end(), p,
                                       [](const TokenRecord& r, PlaceId q) { return r.place < q; });
            // p is in the cut, so the record exists
            const auto& post = g.place_post(p);
            size_t idx = static_cast<size_t>(
                std::find(post.begin(), post.end(), t) - post.begin());
            if (!(it->commitment >> idx & 1)) { ok = false; break; }
        }
        if (ok) out.push_back(t);
    }
    return out;
}

bool is_env_transition(const PetriGame& g, TransId t) {
    for (auto p : g.pre(t))
        if (g.is_env(p)) return true;
    return false;
}

void classify(const PetriGame& g, GGState& s) {
    Marking cut;
    cut.push_back(s.env_place);
    for (const auto& r : s.system) cut.push_back(r.place);
    cut = make_marking(std::move(cut));

    if (s.pending) {
        s.owner = Owner::kPlayer0;
        s.bad = BadKind::kNone;
        for (auto p : cut)
            if (g.is_bad(p)) s.bad = BadKind::kBadPlace;
        return;
    }

    std::vector<TransId> en = enabled(g, cut);
    std::vector<TransId> chosen = chosen_transitions(g, s, en);

    // nondeterminism: two chosen transitions share a system preset place
    bool nondet = false;
    for (size_t a = 0; a < chosen.size() && !nondet; ++a) {
        const auto& pa = g.pre(chosen[a]);
        for (size_t b = a + 1; b < chosen.size() && !nondet; ++b) {
            for (auto p : g.pre(chosen[b])) {
                if (g.is_system(p) && std::binary_search(pa.begin(), pa.end(), p)) {
                    nondet = true;
                    break;
                }
            }
        }
    }
    bool badplace = false;
    for (auto p : cut) badplace = badplace || g.is_bad(p);

    if (nondet)
        s.bad = BadKind::kNondeterministic;
    else if (badplace)
        s.bad = BadKind::kBadPlace;
    else if (!en.empty() && chosen.empty())
        s.bad = BadKind::kDeadlock;
    else
        s.bad = BadKind::kNone;

    bool system_progress = false;
    for (auto t : chosen)
        if (g.is_system_only(t)) system_progress = true;
    s.owner = system_progress ? Owner::kPlayer0 : Owner::kPlayer1;
}

} // namespace

GameGraph build_game_graph(const PetriGame& game, const SymbolicOptions& opts) {
    SupportReport rep = check_supported(game);
    if (!rep.ok) throw Unsupported(rep.reason);

    GameGraph gg;
    gg.game = game;
    gg.processes = rep.processes;

    std::unordered_map<StateKey, uint32_t, StateKeyHash> index;
    auto intern = [&](PlaceId env, std::vector<TokenRecord> recs) {
        std::sort(recs.begin(), recs.end(),
                  [](const TokenRecord& a, const TokenRecord& b) { return a.place < b.place; });
        StateKey key{env, recs};
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        if (gg.states.size() >= opts.state_budget)
            throw StateBudgetExceeded("game graph exceeds " + std::to_string(opts.state_budget) +
                                      " states");
        GGState s;
        s.env_place = env;
        s.system = std::move(recs);
        s.pending = false;
        for (const auto& r : s.system) s.pending = s.pending || !r.committed;
        classify(game, s);
        uint32_t id = static_cast<uint32_t>(gg.states.size());
        gg.states.push_back(std::move(s));
        gg.edges.emplace_back();
        index.emplace(std::move(key), id);
        return id;
    };

    // initial state
    {
        PlaceId env{UINT32_MAX};
        std::vector<TokenRecord> recs;
        for (auto p : game.initial_marking()) {
            if (game.is_env(p))
                env = p;
            else
                recs.push_back({p, false, false, 0});
        }
        gg.initial = intern(env, std::move(recs));
    }

    // Enumerates every subset combination of the given places' postsets.
    auto for_each_assignment =
        [&](const std::vector<PlaceId>& places,
            const std::function<void(const std::vector<std::pair<PlaceId, uint64_t>>&)>& fn) {
            size_t fanout = 1;
            for (auto p : places) {
                size_t deg = game.place_post(p).size();
                if (deg >= 63) throw StateBudgetExceeded("postset too large for commitment masks");
                fanout *= static_cast<size_t>(1) << deg;
                if (fanout > opts.max_commitment_choices)
                    throw StateBudgetExceeded("commitment fan-out exceeds budget");
            }
            std::vector<std::pair<PlaceId, uint64_t>> asg(places.size());
            for (size_t i = 0; i < places.size(); ++i) asg[i] = {places[i], 0};
            std::function<void(size_t)> rec = [&](size_t i) {
                if (i == places.size()) {
                    fn(asg);
                    return;
                }
                uint64_t limit = 1ull << game.place_post(places[i]).size();
                for (uint64_t mask = 0; mask < limit; ++mask) {
                    asg[i].second = mask;
                    rec(i + 1);
                }
            };
            rec(0);
        };

    for (uint32_t si = 0; si < gg.states.size(); ++si) {
        GGState s = gg.states[si]; // copy: the vector may grow
        if (s.bad != BadKind::kNone) continue;

        if (s.pending) {
            std::vector<PlaceId> open;
            for (const auto& r : s.system)
                if (!r.committed) open.push_back(r.place);
            for_each_assignment(open, [&](const std::vector<std::pair<PlaceId, uint64_t>>& asg) {
                std::vector<TokenRecord> recs = s.system;
                for (auto& r : recs) {
                    if (r.committed) continue;
                    auto it = std::find_if(asg.begin(), asg.end(),
                                           [&](const auto& a) { return a.first == r.place; });
                    r.top = false;
                    r.committed = true;
                    r.commitment = it->second;
                }
                GGEdge e;
                e.kind = GGEdge::kResolve;
                e.assignments = asg;
                e.target = intern(s.env_place, std::move(recs));
                gg.edges[si].push_back(std::move(e));
            });
            std::sort(gg.edges[si].begin(), gg.edges[si].end());
            continue;
        }

        Marking cut = gg.cut_of(si);
        std::vector<TransId> en = enabled(game, cut);
        std::vector<TransId> chosen = chosen_transitions(game, s, en);

        if (s.owner == Owner::kPlayer0) {
            // fire system-only chosen transitions; successors commit directly
            for (auto t : chosen) {
                if (!game.is_system_only(t)) continue;
                std::vector<PlaceId> new_places;
                for (auto p : game.post(t)) new_places.push_back(p); // all system
                for_each_assignment(
                    new_places, [&](const std::vector<std::pair<PlaceId, uint64_t>>& asg) {
                        std::vector<TokenRecord> recs;
                        for (const auto& r : s.system) {
                            const auto& pre = game.pre(t);
                            if (!std::binary_search(pre.begin(), pre.end(), r.place))
                                recs.push_back(r);
                        }
                        for (const auto& [p, mask] : asg) recs.push_back({p, false, true, mask});
                        GGEdge e;
                        e.kind = GGEdge::kFire;
                        e.trans = t;
                        e.assignments = asg;
                        e.target = intern(s.env_place, std::move(recs));
                        gg.edges[si].push_back(std::move(e));
                    });
            }
        } else {
            // mcut: the environment fires a chosen env transition; fresh
            // system places get a top flag and re-commit in the target.
            for (auto t : chosen) {
                if (!is_env_transition(game, t)) continue;
                std::vector<TokenRecord> recs;
                for (const auto& r : s.system) {
                    const auto& pre = game.pre(t);
                    if (!std::binary_search(pre.begin(), pre.end(), r.place)) recs.push_back(r);
                }
                PlaceId env = s.env_place;
                bool env_consumed = std::binary_search(game.pre(t).begin(), game.pre(t).end(),
                                                       s.env_place);
                if (env_consumed) env = PlaceId{UINT32_MAX};
                for (auto p : game.post(t)) {
                    if (game.is_env(p))
                        env = p;
                    else
                        recs.push_back({p, true, false, 0});
                }
                if (env.v == UINT32_MAX)
                    throw Error("environment token vanished while firing " + game.trans_name(t));
                GGEdge e;
                e.kind = GGEdge::kFire;
                e.trans = t;
                e.target = intern(env, std::move(recs));
                gg.edges[si].push_back(std::move(e));
            }
        }
        std::sort(gg.edges[si].begin(), gg.edges[si].end());
    }
    return gg;
}

// ---------------------------------------------------------------------------
// Safety solving
// ---------------------------------------------------------------------------

namespace {

std::optional<SafetySolution> finish_solution(const GameGraph& g, const std::vector<char>& attr) {
    SafetySolution sol;
    sol.winning.assign(g.states.size(), 0);
    for (size_t i = 0; i < g.states.size(); ++i) sol.winning[i] = attr[i] ? 0 : 1;
    sol.choice.assign(g.states.size(), -1);
    for (size_t i = 0; i < g.states.size(); ++i) {
        if (!sol.winning[i] || g.states[i].owner != Owner::kPlayer0) continue;
        for (size_t e = 0; e < g.edges[i].size(); ++e) {
            if (sol.winning[g.edges[i][e].target]) {
                sol.choice[i] = static_cast<int32_t>(e);
                break;
            }
        }
    }
    if (!sol.winning[g.initial]) return std::nullopt;
    return sol;
}

} // namespace

std::optional<SafetySolution> solve_safety_serial(const GameGraph& g) {
    size_t n = g.states.size();
    std::vector<std::vector<uint32_t>> preds(n);
    std::vector<uint32_t> out_deg(n, 0);
    for (uint32_t s = 0; s < n; ++s) {
        out_deg[s] = static_cast<uint32_t>(g.edges[s].size());
        for (const auto& e : g.edges[s]) preds[e.target].push_back(s);
    }

    std::vector<char> attr(n, 0);
    std::deque<uint32_t> queue;
    for (uint32_t s = 0; s < n; ++s)
        if (g.states[s].bad != BadKind::kNone) {
            attr[s] = 1;
            queue.push_back(s);
        }
    std::vector<uint32_t> remaining = out_deg;
    while (!queue.empty()) {
        uint32_t s = queue.front();
        queue.pop_front();
        for (uint32_t p : preds[s]) {
            if (attr[p]) continue;
            if (g.states[p].owner == Owner::kPlayer1) {
                attr[p] = 1;
                queue.push_back(p);
            } else if (--remaining[p] == 0) {
                attr[p] = 1;
                queue.push_back(p);
            }
        }
    }
    return finish_solution(g, attr);
}

std::optional<SafetySolution> solve_safety(const GameGraph& g) {
    size_t n = g.states.size();
    std::vector<std::vector<uint32_t>> preds(n);
    for (uint32_t s = 0; s < n; ++s)
        for (const auto& e : g.edges[s]) preds[e.target].push_back(s);

    std::vector<std::atomic<int>> remaining(n);
    std::vector<std::atomic<char>> attr(n);
    for (uint32_t s = 0; s < n; ++s) {
        remaining[s].store(static_cast<int>(g.edges[s].size()), std::memory_order_relaxed);
        attr[s].store(0, std::memory_order_relaxed);
    }

    std::vector<uint32_t> frontier;
    for (uint32_t s = 0; s < n; ++s)
        if (g.states[s].bad != BadKind::kNone) {
            attr[s].store(1, std::memory_order_relaxed);
            frontier.push_back(s);
        }

    while (!frontier.empty()) {
        std::vector<uint32_t> next;
#pragma omp parallel
        {
            std::vector<uint32_t> local;
#pragma omp for nowait
            for (int64_t fi = 0; fi < static_cast<int64_t>(frontier.size()); ++fi) {
                for (uint32_t p : preds[frontier[static_cast<size_t>(fi)]]) {
                    if (g.states[p].owner == Owner::kPlayer1) {
                        if (!attr[p].exchange(1)) local.push_back(p);
                    } else if (remaining[p].fetch_sub(1) == 1) {
                        if (!attr[p].exchange(1)) local.push_back(p);
                    }
                }
            }
#pragma omp critical
            next.insert(next.end(), local.begin(), local.end());
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        frontier = std::move(next);
    }

    std::vector<char> plain(n);
    for (uint32_t s = 0; s < n; ++s) plain[s] = attr[s].load();
    return finish_solution(g, plain);
}

// ---------------------------------------------------------------------------
// translate_strategy
// ---------------------------------------------------------------------------

BoundedStrategy translate_strategy(const PetriGame& game, const GameGraph& g,
                                   const SafetySolution& sol, const TranslateOptions& opts) {
    struct CopyInfo {
        PlaceId orig;
        int64_t creator; // -1 initial, else transition copy id
    };
    struct TransCopy {
        TransId orig;
        std::vector<uint32_t> pre;
        std::vector<uint32_t> post;
    };
    std::vector<CopyInfo> copies;
    std::map<std::pair<uint32_t, int64_t>, uint32_t> copy_index;
    std::vector<TransCopy> tcopies;
    std::map<std::pair<uint32_t, std::vector<uint32_t>>, uint32_t> tcopy_index;
    std::vector<std::optional<uint64_t>> commitment; // per copy, over place_post(orig)

    auto intern_copy = [&](PlaceId orig, int64_t creator) {
        auto key = std::make_pair(orig.v, creator);
        auto it = copy_index.find(key);
        if (it != copy_index.end()) return it->second;
        uint32_t id = static_cast<uint32_t>(copies.size());
        copies.push_back({orig, creator});
        commitment.push_back(std::nullopt);
        copy_index.emplace(key, id);
        return id;
    };
    auto set_commitment = [&](uint32_t copy, uint64_t mask) {
        if (!commitment[copy]) commitment[copy] = mask; // first visit wins
    };

    // configuration: game-graph state plus the copy each cut place holds
    using TokenMap = std::vector<std::pair<uint32_t, uint32_t>>; // (place, copy) sorted
    std::map<std::pair<uint32_t, TokenMap>, bool> seen;
    std::deque<std::pair<uint32_t, TokenMap>> queue;

    {
        TokenMap tm;
        for (auto p : game.initial_marking()) tm.push_back({p.v, intern_copy(p, -1)});
        std::sort(tm.begin(), tm.end());
        auto cfg = std::make_pair(g.initial, tm);
        seen[cfg] = true;
        queue.push_back(cfg);
    }

    while (!queue.empty()) {
        auto [si, tm] = queue.front();
        queue.pop_front();
        if (seen.size() > opts.config_budget)
            throw TranslateFailed("translation walk exceeded its budget");
        const GGState& s = g.states[si];
        if (s.bad != BadKind::kNone)
            throw TranslateFailed("chosen subgraph reaches a bad state");

        auto copy_at = [&](PlaceId p) {
            auto it = std::lower_bound(tm.begin(), tm.end(), std::make_pair(p.v, 0u));
            if (it == tm.end() || it->first != p.v)
                throw Error("internal: token map misses place " + game.place_name(p));
            return it->second;
        };

        std::vector<const GGEdge*> follow;
        if (s.owner == Owner::kPlayer0) {
            if (sol.choice[si] >= 0) follow.push_back(&g.edges[si][sol.choice[si]]);
        } else {
            for (const auto& e : g.edges[si]) follow.push_back(&e);
        }

        for (const GGEdge* e : follow) {
            TokenMap next = tm;
            if (e->kind == GGEdge::kResolve) {
                for (const auto& [p, mask] : e->assignments) set_commitment(copy_at(p), mask);
            } else {
                TransId t = e->trans;
                std::vector<uint32_t> consumed;
                for (auto p : game.pre(t)) consumed.push_back(copy_at(p));
                std::sort(consumed.begin(), consumed.end());
                auto tkey = std::make_pair(t.v, consumed);
                uint32_t tc;
                auto it = tcopy_index.find(tkey);
                if (it != tcopy_index.end()) {
                    tc = it->second;
                } else {
                    tc = static_cast<uint32_t>(tcopies.size());
                    TransCopy trc;
                    trc.orig = t;
                    trc.pre = consumed;
                    for (auto q : game.post(t)) trc.post.push_back(intern_copy(q, tc));
                    tcopies.push_back(trc);
                    tcopy_index.emplace(tkey, tc);
                }
                const TransCopy& trc = tcopies[tc];
                TokenMap updated;
                for (const auto& [pv, cv] : next) {
                    const auto& pre = game.pre(t);
                    if (!std::binary_search(pre.begin(), pre.end(), PlaceId{pv}))
                        updated.push_back({pv, cv});
                }
                {
                    size_t qi = 0;
                    for (auto q : game.post(t)) updated.push_back({q.v, trc.post[qi++]});
                }
                std::sort(updated.begin(), updated.end());
                next = std::move(updated);
                for (const auto& [p, mask] : e->assignments) {
                    auto pit = std::lower_bound(next.begin(), next.end(), std::make_pair(p.v, 0u));
                    set_commitment(pit->second, mask);
                }
            }
            auto cfg = std::make_pair(e->target, next);
            if (seen.emplace(cfg, true).second) queue.push_back(cfg);
        }
    }

    // Completion: add the refused alternatives visible from the reachable
    // part of the induced net so that deadlock checks bite.
    auto mask_allows = [&](uint32_t copy, TransId orig) {
        if (!commitment[copy]) return false;
        const auto& post = game.place_post(copies[copy].orig);
        size_t idx = static_cast<size_t>(std::find(post.begin(), post.end(), orig) - post.begin());
        if (idx >= post.size()) return false;
        return (*commitment[copy] >> idx & 1) != 0;
    };
    auto copy_allowed = [&](const TransCopy& trc) {
        for (uint32_t c : trc.pre)
            if (game.is_system(copies[c].orig) && !mask_allows(c, trc.orig)) return false;
        return true;
    };

    {
        std::set<std::vector<uint32_t>> visited;
        std::deque<std::vector<uint32_t>> mqueue;
        std::vector<uint32_t> init;
        for (uint32_t c = 0; c < copies.size(); ++c)
            if (copies[c].creator < 0) init.push_back(c);
        std::sort(init.begin(), init.end());
        visited.insert(init);
        mqueue.push_back(init);
        while (!mqueue.empty()) {
            std::vector<uint32_t> mu = mqueue.front();
            mqueue.pop_front();
            if (visited.size() > opts.config_budget)
                throw TranslateFailed("completion walk exceeded its budget");
            // copies by original place for this marking
            std::map<uint32_t, uint32_t> by_orig;
            for (uint32_t c : mu) by_orig[copies[c].orig.v] = c;
            for (uint32_t tv = 0; tv < game.num_transitions(); ++tv) {
                TransId t{tv};
                std::vector<uint32_t> pre_copies;
                bool enabled_here = true;
                for (auto p : game.pre(t)) {
                    auto it = by_orig.find(p.v);
                    if (it == by_orig.end()) { enabled_here = false; break; }
                    pre_copies.push_back(it->second);
                }
                if (!enabled_here) continue;
                std::sort(pre_copies.begin(), pre_copies.end());
                auto tkey = std::make_pair(tv, pre_copies);
                uint32_t tc;
                auto it = tcopy_index.find(tkey);
                if (it != tcopy_index.end()) {
                    tc = it->second;
                } else {
                    tc = static_cast<uint32_t>(tcopies.size());
                    TransCopy trc;
                    trc.orig = t;
                    trc.pre = pre_copies;
                    for (auto q : game.post(t)) trc.post.push_back(intern_copy(q, tc));
                    tcopies.push_back(trc);
                    tcopy_index.emplace(tkey, tc);
                }
                const TransCopy& trc = tcopies[tc];
                if (!copy_allowed(trc)) continue;
                // fire within the induced net
                std::vector<uint32_t> nm;
                for (uint32_t c : mu)
                    if (!std::binary_search(trc.pre.begin(), trc.pre.end(), c)) nm.push_back(c);
                nm.insert(nm.end(), trc.post.begin(), trc.post.end());
                std::sort(nm.begin(), nm.end());
                nm.erase(std::unique(nm.begin(), nm.end()), nm.end());
                if (visited.insert(nm).second) mqueue.push_back(nm);
            }
        }
    }

    // Materialize the unfolding and the decision map.
    BoundedStrategy out;
    out.base.original = game;
    std::vector<size_t> copy_count(game.num_places(), 0);
    std::vector<PlaceId> place_of_copy(copies.size());
    for (uint32_t c = 0; c < copies.size(); ++c) {
        PlaceId orig = copies[c].orig;
        size_t k = copy_count[orig.v]++;
        std::string name = game.place_name(orig);
        if (k > 0) name += "'" + std::to_string(k);
        while (out.base.game.find_place(name)) name += "_";
        place_of_copy[c] = out.base.game.add_place(name, game.is_system(orig), game.is_bad(orig),
                                                   copies[c].creator < 0);
        out.base.fold_place.push_back(orig);
    }
    std::vector<size_t> tcount(game.num_transitions(), 0);
    for (uint32_t tc = 0; tc < tcopies.size(); ++tc) {
        TransId orig = tcopies[tc].orig;
        size_t k = tcount[orig.v]++;
        std::string name = game.trans_name(orig);
        if (k > 0) name += "'" + std::to_string(k);
        while (out.base.game.find_transition(name)) name += "_";
        TransId nt = out.base.game.add_transition(name);
        out.base.fold_transition.push_back(orig);
        for (uint32_t c : tcopies[tc].pre) out.base.game.add_flow(place_of_copy[c], nt);
        for (uint32_t c : tcopies[tc].post) out.base.game.add_flow(nt, place_of_copy[c]);
    }
    out.base.game.finalize();
    out.base.bound = 1;
    for (size_t cnt : copy_count) out.base.bound = std::max(out.base.bound, cnt);

    for (uint32_t c = 0; c < copies.size(); ++c) {
        if (!game.is_system(copies[c].orig)) continue;
        std::set<TransId> originals;
        for (auto t : out.base.game.place_post(place_of_copy[c]))
            originals.insert(out.base.fold_transition[t.v]);
        for (auto o : originals)
            out.allowed[std::make_pair(place_of_copy[c], o)] = mask_allows(c, o);
    }

    if (opts.validate) {
        ValidationReport report = validate_strategy(out);
        if (!report.winning)
            throw TranslateFailed("translated strategy fails validation");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Metrics and dumps
// ---------------------------------------------------------------------------

size_t bdd_variable_estimate(const PetriGame& game, const std::vector<TokenProcess>& processes) {
    auto clog2 = [](size_t x) {
        size_t bits = 0;
        while ((static_cast<size_t>(1) << bits) < x) ++bits;
        return bits;
    };
    size_t env_places = 0;
    for (uint32_t p = 0; p < game.num_places(); ++p)
        env_places += game.is_env(PlaceId{p}) ? 1 : 0;
    size_t total = clog2(std::max<size_t>(env_places, 1));
    for (const auto& proc : processes) {
        if (proc.environment) continue;
        std::set<TransId> ts;
        for (auto p : proc.places)
            for (auto t : game.place_post(p)) ts.insert(t);
        total += clog2(std::max<size_t>(proc.places.size(), 1)) + ts.size() + 2;
    }
    return 2 * total;
}

std::string dump_game_graph(const GameGraph& g) {
    std::ostringstream out;
    for (uint32_t s = 0; s < g.states.size(); ++s) {
        const GGState& st = g.states[s];
        out << s << " owner=" << (st.owner == Owner::kPlayer0 ? "0" : "1");
        out << " bad=";
        switch (st.bad) {
            case BadKind::kNone: out << "none"; break;
            case BadKind::kNondeterministic: out << "nondet"; break;
            case BadKind::kBadPlace: out << "badplace"; break;
            case BadKind::kDeadlock: out << "deadlock"; break;
        }
        out << " env=" << g.game.place_name(st.env_place);
        out << " sys=[";
        for (size_t i = 0; i < st.system.size(); ++i) {
            const auto& r = st.system[i];
            if (i) out << " ";
            out << g.game.place_name(r.place) << (r.top ? ":top" : "") << ":";
            if (!r.committed) {
                out << "?";
            } else {
                out << "{";
                const auto& post = g.game.place_post(r.place);
                bool first = true;
                for (size_t b = 0; b < post.size(); ++b) {
                    if (r.commitment >> b & 1) {
                        if (!first) out << ",";
                        out << g.game.trans_name(post[b]);
                        first = false;
                    }
                }
                out << "}";
            }
        }
        out << "] ->";
        for (const auto& e : g.edges[s]) {
            out << " ";
            if (e.kind == GGEdge::kFire)
                out << g.game.trans_name(e.trans) << ">" << e.target;
            else
                out << "commit>" << e.target;
        }
        out << "\n";
    }
    return out.str();
}

} // namespace pgsynt
