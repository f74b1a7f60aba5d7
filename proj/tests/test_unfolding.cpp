#include "pgsynt/unfolding.hpp"

#include "pgsynt/benchmarks.hpp"

#include <doctest.h>

#include <map>
#include <random>
#include <set>

using namespace pgsynt;

namespace {

PetriGame chain_net(int n) {
    PetriGame g;
    std::vector<PlaceId> p;
    for (int i = 0; i <= n; ++i)
        p.push_back(g.add_place("p" + std::to_string(i), false, false, i == 0));
    for (int i = 1; i <= n; ++i) {
        auto t = g.add_transition("t" + std::to_string(i));
        g.add_flow(p[i - 1], t);
        g.add_flow(t, p[i]);
    }
    g.finalize();
    return g;
}

// Fold maps are bijections and folding reproduces the original structure.
void check_isomorphic(const BoundedUnfolding& unf) {
    const PetriGame& o = unf.original;
    const PetriGame& u = unf.game;
    REQUIRE(u.num_places() == o.num_places());
    REQUIRE(u.num_transitions() == o.num_transitions());
    std::set<uint32_t> hit;
    for (auto p : unf.fold_place) CHECK(hit.insert(p.v).second);
    std::set<std::pair<uint32_t, uint32_t>> oflow, uflow;
    for (uint32_t t = 0; t < o.num_transitions(); ++t)
        for (auto p : o.pre(TransId{t})) oflow.insert({p.v, t});
    for (uint32_t t = 0; t < u.num_transitions(); ++t)
        for (auto p : u.pre(TransId{t}))
            uflow.insert({unf.fold_place[p.v].v, unf.fold_transition[t].v});
    CHECK(oflow == uflow);
    for (uint32_t p = 0; p < u.num_places(); ++p) {
        PlaceId copy{p}, orig = unf.fold_place[p];
        CHECK(u.is_system(copy) == o.is_system(orig));
        CHECK(u.is_bad(copy) == o.is_bad(orig));
    }
    Marking folded_init;
    for (auto p : u.initial_marking()) folded_init.push_back(unf.fold_place[p.v]);
    CHECK(make_marking(folded_init) == o.initial_marking());
}

std::map<std::string, int> copy_counts(const BoundedUnfolding& unf) {
    std::map<std::string, int> counts;
    for (auto orig : unf.fold_place) counts[unf.original.place_name(orig)]++;
    return counts;
}

} // namespace

TEST_CASE("b=1 yields the original game up to renaming") {
    for (auto spec : {BenchmarkSpec{Family::kAS, 2, 1}, BenchmarkSpec{Family::kDW, 2, 1},
                      BenchmarkSpec{Family::kCM, 2, 1}}) {
        BoundedUnfolding unf = bounded_unfolding(generate(spec), 1);
        check_isomorphic(unf);
    }
}

TEST_CASE("acyclic conflict-free net is not unfolded at any bound") {
    PetriGame g = chain_net(4);
    for (size_t b : {1, 2, 5}) check_isomorphic(bounded_unfolding(g, b));
}

TEST_CASE("as(2) at b=4: the decision places get all four history copies") {
    PetriGame g = generate({Family::kAS, 2, 1});
    BoundedUnfolding unf = bounded_unfolding(g, 4);
    auto counts = copy_counts(unf);
    CHECK(counts["pA"] == 4);
    CHECK(counts["pB"] == 4);
    CHECK(counts["SA"] == 1);
    CHECK(counts["SAA"] == 1);
    // four distinct histories exist, so the counts saturate beyond b=4
    auto counts5 = copy_counts(bounded_unfolding(g, 5));
    CHECK(counts5["pA"] == 4);
    CHECK(counts5["pB"] == 4);
}

TEST_CASE("copy-count bound holds for every place") {
    PetriGame g = generate({Family::kAS, 2, 1});
    for (size_t b : {1, 2, 3, 4}) {
        auto counts = copy_counts(bounded_unfolding(g, b));
        for (auto& [name, c] : counts) CHECK(static_cast<size_t>(c) <= b);
    }
}

TEST_CASE("loops unroll up to the bound") {
    PetriGame g;
    auto p = g.add_place("p", true, false, true);
    auto q = g.add_place("q", true);
    auto t1 = g.add_transition("go");
    g.add_flow(p, t1);
    g.add_flow(t1, q);
    auto t2 = g.add_transition("back");
    g.add_flow(q, t2);
    g.add_flow(t2, p);
    g.finalize();
    for (size_t b : {1, 2, 3, 5}) {
        auto counts = copy_counts(bounded_unfolding(g, b));
        CHECK(counts["p"] == static_cast<int>(b));
        CHECK(counts["q"] == static_cast<int>(b));
    }
}

TEST_CASE("folding soundness: unfolding plays replay on the original") {
    std::mt19937 rng(11);
    for (auto spec : {BenchmarkSpec{Family::kAS, 2, 1}, BenchmarkSpec{Family::kCM, 2, 1}}) {
        PetriGame g = generate(spec);
        BoundedUnfolding unf = bounded_unfolding(g, 3);
        for (int run = 0; run < 30; ++run) {
            Marking mu = unf.game.initial_marking();
            Marking mo = g.initial_marking();
            for (int step = 0; step < 12; ++step) {
                auto en = enabled(unf.game, mu);
                if (en.empty()) break;
                TransId tc = en[rng() % en.size()];
                TransId to = unf.fold_transition[tc.v];
                REQUIRE(is_enabled(g, mo, to));
                mu = fire(unf.game, mu, tc);
                mo = fire(g, mo, to);
                Marking folded;
                for (auto p : mu) folded.push_back(unf.fold_place[p.v]);
                CHECK(make_marking(folded) == mo);
            }
        }
    }
}

TEST_CASE("coverage of original transitions is monotone in b") {
    for (auto spec : {BenchmarkSpec{Family::kAS, 2, 1}, BenchmarkSpec{Family::kDW, 3, 1},
                      BenchmarkSpec{Family::kCM, 2, 2}, BenchmarkSpec{Family::kJP, 2, 1}}) {
        PetriGame g = generate(spec);
        size_t prev = 0;
        for (size_t b = 1; b <= 4; ++b) {
            BoundedUnfolding unf = bounded_unfolding(g, b);
            std::set<uint32_t> covered;
            for (auto t : unf.fold_transition) covered.insert(t.v);
            CHECK(covered.size() >= prev);
            prev = covered.size();
        }
    }
}

TEST_CASE("prune: chain longer than the horizon loses its tail") {
    const uint32_t n = 5;
    PetriGame g = chain_net(n + 3);
    BoundedUnfolding unf = bounded_unfolding(g, 1);
    BoundedUnfolding pruned = prune_unreachable(unf, n);
    // transitions fired or enabled within the horizon: t1..tn
    CHECK(pruned.game.num_transitions() == n);
    std::set<std::string> tnames;
    for (uint32_t t = 0; t < pruned.game.num_transitions(); ++t)
        tnames.insert(pruned.game.trans_name(TransId{t}));
    CHECK(tnames.count("t" + std::to_string(n)) == 1);
    CHECK(tnames.count("t" + std::to_string(n + 1)) == 0);
    // their postset places survive: p0..pn
    CHECK(pruned.game.num_places() == n + 1);
}

TEST_CASE("prune: identity when everything is within the horizon") {
    PetriGame g = chain_net(3);
    BoundedUnfolding unf = bounded_unfolding(g, 1);
    BoundedUnfolding pruned = prune_unreachable(unf, 10);
    CHECK(serialize_unfolding(pruned) == serialize_unfolding(unf));
}

TEST_CASE("prune is idempotent on cm(2,1)") {
    BoundedUnfolding unf = bounded_unfolding(generate({Family::kCM, 2, 1}), 2);
    BoundedUnfolding once = prune_unreachable(unf, 4);
    BoundedUnfolding twice = prune_unreachable(once, 4);
    CHECK(serialize_unfolding(once) == serialize_unfolding(twice));
}

TEST_CASE("unfolding serialization round-trips") {
    PetriGame g = generate({Family::kAS, 2, 1});
    BoundedUnfolding unf = bounded_unfolding(g, 3);
    BoundedUnfolding back = parse_unfolding(serialize_unfolding(unf), g);
    CHECK(serialize_unfolding(back) == serialize_unfolding(unf));
    CHECK(back.bound == unf.bound);
}

TEST_CASE("unfolding a non-safe game fails loudly") {
    PetriGame g;
    auto a = g.add_place("a", false, false, true);
    auto b = g.add_place("b", false, false, true);
    auto c = g.add_place("c", false);
    auto t1 = g.add_transition("t1");
    g.add_flow(a, t1);
    g.add_flow(t1, c);
    auto t2 = g.add_transition("t2");
    g.add_flow(b, t2);
    g.add_flow(t2, c);
    g.finalize();
    CHECK_THROWS_AS(bounded_unfolding(g, 2), UnsafeFiring);
}
