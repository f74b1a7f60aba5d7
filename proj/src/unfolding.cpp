#include "pgsynt/unfolding.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pgsynt {

namespace {

std::string copy_name(const PetriGame& g, const std::string& base, size_t k) {
    if (k == 0 && !g.find_place(base) && !g.find_transition(base)) return base;
    std::string name = base + "'" + std::to_string(k);
    while (g.find_place(name) || g.find_transition(name)) name += "_";
    return name;
}

} // namespace

BoundedUnfolding bounded_unfolding(const PetriGame& game, size_t b, const UnfoldOptions& opts) {
    if (b < 1) throw Error("bound must be at least 1");
    if (!game.finalized()) throw Error("game not finalized");

    BoundedUnfolding unf;
    unf.original = game;
    unf.bound = b;

    // copies_of[p] lists the copy ids of original place p, in creation order.
    std::vector<std::vector<PlaceId>> copies_of(game.num_places());
    auto new_place_copy = [&](PlaceId orig) {
        size_t k = copies_of[orig.v].size();
        PlaceId c = unf.game.add_place(copy_name(unf.game, game.place_name(orig), k),
                                       game.is_system(orig), game.is_bad(orig), false);
        copies_of[orig.v].push_back(c);
        unf.fold_place.push_back(orig);
        return c;
    };

    Marking init;
    for (auto p : game.initial_marking()) init.push_back(new_place_copy(p));
    init = make_marking(std::move(init));

    // Transition copies are identified by (original transition, preset copies).
    std::map<std::pair<TransId, std::vector<PlaceId>>, TransId> trans_copy;
    std::vector<std::vector<PlaceId>> copy_pre, copy_post; // per transition copy
    std::vector<size_t> copies_per_trans(game.num_transitions(), 0);

    std::unordered_set<Marking> seen;
    std::deque<Marking> queue;
    seen.insert(init);
    queue.push_back(init);
    size_t explored = 0;

    while (!queue.empty()) {
        Marking m = queue.front();
        queue.pop_front();
        if (++explored > opts.marking_budget)
            throw BudgetExceeded("unfolding exploration exceeded marking budget");

        for (uint32_t tv = 0; tv < game.num_transitions(); ++tv) {
            TransId t{tv};
            // Collect the copies in m folding onto pre(t); a reachable marking
            // holds at most one copy per original place.
            std::vector<PlaceId> pre_copies;
            for (auto orig : game.pre(t)) {
                PlaceId found{UINT32_MAX};
                for (auto c : m)
                    if (unf.fold_place[c.v] == orig) { found = c; break; }
                if (found.v == UINT32_MAX) { pre_copies.clear(); break; }
                pre_copies.push_back(found);
            }
            if (pre_copies.size() != game.pre(t).size()) continue;
            std::sort(pre_copies.begin(), pre_copies.end());

            // 1-safety of the original game.
            for (auto orig : game.post(t)) {
                bool in_pre = std::binary_search(game.pre(t).begin(), game.pre(t).end(), orig);
                if (in_pre) continue;
                for (auto c : m)
                    if (unf.fold_place[c.v] == orig)
                        throw UnsafeFiring("game is not safe: firing '" + game.trans_name(t) +
                                           "' duplicates '" + game.place_name(orig) + "'");
            }

            auto key = std::make_pair(t, pre_copies);
            auto it = trans_copy.find(key);
            TransId tc;
            if (it != trans_copy.end()) {
                tc = it->second;
            } else {
                tc = unf.game.add_transition(
                    copy_name(unf.game, game.trans_name(t), copies_per_trans[tv]++));
                unf.fold_transition.push_back(t);
                trans_copy.emplace(key, tc);
                copy_pre.push_back(pre_copies);
                std::vector<PlaceId> post_copies;
                for (auto orig : game.post(t)) {
                    PlaceId c;
                    if (copies_of[orig.v].size() < b)
                        c = new_place_copy(orig);
                    else
                        c = copies_of[orig.v][0]; // bound hit: smallest index absorbs
                    post_copies.push_back(c);
                }
                copy_post.push_back(post_copies);
                if (unf.game.num_places() + unf.game.num_transitions() > opts.node_budget)
                    throw BudgetExceeded("unfolding exceeded node budget");
            }

            Marking next;
            const auto& post_copies = copy_post[tc.v];
            std::set_difference(m.begin(), m.end(), copy_pre[tc.v].begin(), copy_pre[tc.v].end(),
                                std::back_inserter(next));
            next.insert(next.end(), post_copies.begin(), post_copies.end());
            next = make_marking(std::move(next));
            if (seen.insert(next).second) queue.push_back(next);
        }
    }

    // Materialize flows and the initial marking, then rebuild through the
    // PetriGame API so indices are consistent.
    PetriGame net;
    for (uint32_t p = 0; p < unf.game.num_places(); ++p) {
        PlaceId id{p};
        PlaceId orig = unf.fold_place[p];
        net.add_place(unf.game.place_name(id), game.is_system(orig), game.is_bad(orig),
                      marking_contains(init, id));
    }
    for (uint32_t t = 0; t < unf.game.num_transitions(); ++t) {
        TransId id{t};
        net.add_transition(unf.game.trans_name(id));
        for (auto p : copy_pre[t]) net.add_flow(p, id);
        for (auto p : copy_post[t]) net.add_flow(id, p);
    }
    net.finalize();
    unf.game = std::move(net);
    return unf;
}

BoundedUnfolding prune_unreachable(const BoundedUnfolding& unf, size_t n) {
    if (n < 1) throw Error("prune bound must be at least 1");
    const PetriGame& g = unf.game;

    std::vector<char> keep_place(g.num_places(), 0);
    std::vector<char> keep_trans(g.num_transitions(), 0);

    // BFS over markings of the unfolding with minimal firing depth; places in
    // markings at depth <= n-1 are kept, transitions enabled at depth <= n-1
    // are kept (their enabledness is observable at the last simulated step).
    std::unordered_map<Marking, size_t> depth;
    std::deque<Marking> queue;
    Marking init = g.initial_marking();
    depth[init] = 0;
    queue.push_back(init);
    size_t budget = 1000000;

    while (!queue.empty()) {
        Marking m = queue.front();
        queue.pop_front();
        size_t d = depth[m];
        for (auto p : m) keep_place[p.v] = 1;
        for (auto t : enabled(g, m)) {
            keep_trans[t.v] = 1;
            if (d + 1 <= n - 1) {
                Marking next = fire(g, m, t);
                if (!depth.count(next)) {
                    if (depth.size() + 1 > budget)
                        throw BudgetExceeded("prune exploration exceeded budget");
                    depth.emplace(next, d + 1);
                    queue.push_back(std::move(next));
                }
            }
        }
    }

    // Postset places of kept transitions stay so the net remains well formed.
    for (uint32_t t = 0; t < g.num_transitions(); ++t)
        if (keep_trans[t])
            for (auto p : g.post(TransId{t})) keep_place[p.v] = 1;

    BoundedUnfolding out;
    out.original = unf.original;
    out.bound = unf.bound;
    std::vector<PlaceId> place_map(g.num_places(), PlaceId{UINT32_MAX});
    for (uint32_t p = 0; p < g.num_places(); ++p) {
        if (!keep_place[p]) continue;
        PlaceId id{p};
        place_map[p] = out.game.add_place(g.place_name(id), g.is_system(id), g.is_bad(id),
                                          g.is_initial(id));
        out.fold_place.push_back(unf.fold_place[p]);
    }
    for (uint32_t t = 0; t < g.num_transitions(); ++t) {
        if (!keep_trans[t]) continue;
        TransId id{t};
        TransId nt = out.game.add_transition(g.trans_name(id));
        out.fold_transition.push_back(unf.fold_transition[t]);
        for (auto p : g.pre(id)) out.game.add_flow(place_map[p.v], nt);
        for (auto p : g.post(id)) out.game.add_flow(nt, place_map[p.v]);
    }
    out.game.finalize();
    return out;
}

std::string serialize_unfolding(const BoundedUnfolding& unf) {
    std::ostringstream out;
    out << serialize_game(unf.game);
    out << "bound " << unf.bound << "\n";
    for (uint32_t p = 0; p < unf.game.num_places(); ++p)
        out << "fold " << unf.game.place_name(PlaceId{p}) << " -> "
            << unf.original.place_name(unf.fold_place[p]) << "\n";
    for (uint32_t t = 0; t < unf.game.num_transitions(); ++t)
        out << "fold " << unf.game.trans_name(TransId{t}) << " -> "
            << unf.original.trans_name(unf.fold_transition[t]) << "\n";
    return out.str();
}

// The serialized form names fold targets in the original game; the original
// place names are reused verbatim, so targets resolve against `original`.
BoundedUnfolding parse_unfolding(const std::string& text, const PetriGame& original) {
    std::istringstream in(text);
    std::ostringstream game_text;
    std::vector<std::pair<std::string, std::string>> folds;
    size_t bound = 1;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "fold") {
            std::string a, arrow, b;
            ls >> a >> arrow >> b;
            if (arrow != "->") throw SemanticError("malformed fold line: " + line);
            folds.emplace_back(a, b);
        } else if (kw == "bound") {
            ls >> bound;
        } else {
            game_text << line << "\n";
        }
    }

    BoundedUnfolding unf;
    unf.game = parse_game(game_text.str());
    unf.original = original;
    unf.bound = bound;
    unf.fold_place.assign(unf.game.num_places(), PlaceId{UINT32_MAX});
    unf.fold_transition.assign(unf.game.num_transitions(), TransId{UINT32_MAX});

    for (const auto& [copy, orig] : folds) {
        if (auto cp = unf.game.find_place(copy)) {
            auto op = original.find_place(orig);
            if (!op) throw SemanticError("fold target '" + orig + "' is not a place of the original");
            unf.fold_place[cp->v] = *op;
        } else if (auto ct = unf.game.find_transition(copy)) {
            auto ot = original.find_transition(orig);
            if (!ot)
                throw SemanticError("fold target '" + orig + "' is not a transition of the original");
            unf.fold_transition[ct->v] = *ot;
        } else {
            throw SemanticError("fold source '" + copy + "' is not part of the unfolding");
        }
    }
    for (uint32_t p = 0; p < unf.game.num_places(); ++p)
        if (unf.fold_place[p].v == UINT32_MAX)
            throw SemanticError("place '" + unf.game.place_name(PlaceId{p}) + "' lacks a fold line");
    for (uint32_t t = 0; t < unf.game.num_transitions(); ++t)
        if (unf.fold_transition[t].v == UINT32_MAX)
            throw SemanticError("transition '" + unf.game.trans_name(TransId{t}) +
                                "' lacks a fold line");
    return unf;
}

} // namespace pgsynt
