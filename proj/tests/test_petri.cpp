#include "pgsynt/petri.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace pgsynt;

namespace {

PetriGame chain(int n, bool system = false) {
    // p0 -> t1 -> p1 -> ... -> tn -> pn
    PetriGame g;
    std::vector<PlaceId> p;
    for (int i = 0; i <= n; ++i)
        p.push_back(g.add_place("p" + std::to_string(i), system, false, i == 0));
    for (int i = 1; i <= n; ++i) {
        auto t = g.add_transition("t" + std::to_string(i));
        g.add_flow(p[i - 1], t);
        g.add_flow(t, p[i]);
    }
    g.finalize();
    return g;
}

} // namespace

TEST_CASE("parse: minimal single-place game") {
    PetriGame g = parse_game("place e env initial\n");
    CHECK(g.num_places() == 1);
    CHECK(g.num_transitions() == 0);
    CHECK(g.initial_marking().size() == 1);
    CHECK(g.is_env(PlaceId{0}));
}

TEST_CASE("parse: flags, comments, whitespace") {
    const char* text =
        "# a small net\n"
        "place a system bad initial\n"
        "place b env\n"
        "\n"
        "transition t\n"
        "flow a -> t   # consumes a\n"
        "flow t -> b\n";
    PetriGame g = parse_game(text);
    auto a = g.find_place("a");
    REQUIRE(a.has_value());
    CHECK(g.is_system(*a));
    CHECK(g.is_bad(*a));
    CHECK(g.is_initial(*a));
    auto t = g.find_transition("t");
    REQUIRE(t.has_value());
    CHECK(g.pre(*t).size() == 1);
    CHECK(g.post(*t).size() == 1);
}

TEST_CASE("parse: undeclared identifier in flow is a semantic error") {
    CHECK_THROWS_AS(parse_game("place a env initial\n"
                               "transition t\n"
                               "flow ghost -> t\n"),
                    SemanticError);
    CHECK_THROWS_AS(parse_game("place a env initial\n"
                               "transition t\n"
                               "flow a -> ghost\n"),
                    SemanticError);
}

TEST_CASE("parse: syntax errors carry line/column") {
    try {
        parse_game("place a env\nplace ok env\nbogus line here\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
        CHECK(e.col == 1);
    }
}

TEST_CASE("parse: declaration order is enforced") {
    CHECK_THROWS_AS(parse_game("transition t\nplace a env\nflow a -> t\n"), ParseError);
}

TEST_CASE("parse: empty preset is rejected") {
    CHECK_THROWS_AS(parse_game("place a env\ntransition t\nflow t -> a\n"), SemanticError);
}

TEST_CASE("parse: place in both partitions impossible, duplicates rejected") {
    CHECK_THROWS_AS(parse_game("place a env\nplace a system\n"), ParseError);
}

TEST_CASE("serialize/parse round-trip") {
    const char* text =
        "place a system initial\n"
        "place b env bad\n"
        "transition t\n"
        "flow a -> t\n"
        "flow t -> b\n";
    PetriGame g = parse_game(text);
    CHECK(serialize_game(g) == text);
    PetriGame g2 = parse_game(serialize_game(g));
    CHECK(serialize_game(g2) == serialize_game(g));
}

TEST_CASE("round-trip property over random games") {
    std::mt19937 rng(7);
    for (int iter = 0; iter < 50; ++iter) {
        PetriGame g;
        int np = 1 + static_cast<int>(rng() % 6);
        int nt = static_cast<int>(rng() % 6);
        std::vector<PlaceId> ps;
        for (int i = 0; i < np; ++i)
            ps.push_back(g.add_place("p" + std::to_string(i), rng() % 2 == 0, rng() % 4 == 0,
                                     rng() % 2 == 0));
        for (int i = 0; i < nt; ++i) {
            auto t = g.add_transition("t" + std::to_string(i));
            int k = 1 + static_cast<int>(rng() % np);
            std::set<uint32_t> pre;
            while (static_cast<int>(pre.size()) < k) pre.insert(rng() % np);
            for (auto pv : pre) g.add_flow(PlaceId{pv}, t);
            int j = static_cast<int>(rng() % np);
            for (int x = 0; x < j; ++x) g.add_flow(t, ps[rng() % np]);
        }
        try {
            g.finalize();
        } catch (const SemanticError&) {
            continue; // duplicate postset flow; not a round-trip candidate
        }
        PetriGame g2 = parse_game(serialize_game(g));
        CHECK(serialize_game(g2) == serialize_game(g));
    }
}

TEST_CASE("enabled: empty marking, missing preset") {
    PetriGame g = chain(2);
    CHECK(enabled(g, {}).empty());
    Marking m0 = g.initial_marking();
    auto en = enabled(g, m0);
    REQUIRE(en.size() == 1);
    CHECK(g.trans_name(en[0]) == "t1");
    // t2's preset p1 is not marked
    CHECK(!is_enabled(g, m0, *g.find_transition("t2")));
}

TEST_CASE("fire: self-loop is the identity") {
    PetriGame g;
    auto p = g.add_place("p", false, false, true);
    auto t = g.add_transition("t");
    g.add_flow(p, t);
    g.add_flow(t, p);
    g.finalize();
    Marking m{p};
    CHECK(fire(g, m, t) == m);
}

TEST_CASE("fire: not enabled and unsafe firings raise") {
    PetriGame g;
    auto a = g.add_place("a", false, false, true);
    auto b = g.add_place("b", false, false, true);
    auto t = g.add_transition("t");
    g.add_flow(a, t);
    g.add_flow(t, b);
    g.finalize();
    CHECK_THROWS_AS(fire(g, Marking{}, t), NotEnabled);
    CHECK_THROWS_AS(fire(g, g.initial_marking(), t), UnsafeFiring); // b already marked
}

TEST_CASE("reachable_markings: no transitions, limits") {
    PetriGame g = parse_game("place a env initial\n");
    auto ms = reachable_markings(g, 10);
    CHECK(ms.size() == 1);
    PetriGame g2 = chain(3);
    CHECK(reachable_markings(g2, 10).size() == 4);
    CHECK_THROWS_AS(reachable_markings(g2, 1), LimitExceeded);
}

TEST_CASE("reachable_markings: set independent of exploration order") {
    PetriGame g;
    auto a = g.add_place("a", false, false, true);
    auto b = g.add_place("b", true, false, true);
    auto c = g.add_place("c", false);
    auto d = g.add_place("d", true);
    auto t1 = g.add_transition("t1");
    g.add_flow(a, t1);
    g.add_flow(t1, c);
    auto t2 = g.add_transition("t2");
    g.add_flow(b, t2);
    g.add_flow(t2, d);
    g.finalize();

    std::set<Marking> bfs;
    for (auto& m : reachable_markings(g, 100)) bfs.insert(m);

    // depth-first with shuffled transition order
    std::mt19937 rng(3);
    std::set<Marking> dfs;
    std::vector<Marking> stack{g.initial_marking()};
    while (!stack.empty()) {
        Marking m = stack.back();
        stack.pop_back();
        if (!dfs.insert(m).second) continue;
        auto en = enabled(g, m);
        std::shuffle(en.begin(), en.end(), rng);
        for (auto t : en) stack.push_back(fire(g, m, t));
    }
    CHECK(bfs == dfs);
}

TEST_CASE("fire preserves token count on concurrency-preserving games") {
    PetriGame g = chain(4);
    for (auto& m : reachable_markings(g, 100))
        for (auto t : enabled(g, m)) CHECK(fire(g, m, t).size() == m.size());
}

TEST_CASE("infer_processes: single place game") {
    PetriGame g = parse_game("place a system initial\n");
    auto procs = infer_processes(g);
    CHECK(procs.size() == 1);
    CHECK(procs[0].places.size() == 1);
    CHECK(!procs[0].environment);
}

TEST_CASE("infer_processes: rejects token-count changes") {
    PetriGame g;
    auto a = g.add_place("a", false, false, true);
    auto b = g.add_place("b", true, false, true);
    auto c = g.add_place("c", true);
    auto t = g.add_transition("t");
    g.add_flow(a, t);
    g.add_flow(b, t);
    g.add_flow(t, c);
    g.finalize();
    CHECK_THROWS_AS(infer_processes(g), NotConcurrencyPreserving);
}

TEST_CASE("infer_processes: two parallel chains stay separate") {
    PetriGame g;
    auto a0 = g.add_place("a0", false, false, true);
    auto a1 = g.add_place("a1", false);
    auto b0 = g.add_place("b0", true, false, true);
    auto b1 = g.add_place("b1", true);
    auto ta = g.add_transition("ta");
    g.add_flow(a0, ta);
    g.add_flow(ta, a1);
    auto tb = g.add_transition("tb");
    g.add_flow(b0, tb);
    g.add_flow(tb, b1);
    g.finalize();
    auto procs = infer_processes(g);
    REQUIRE(procs.size() == 2);
    int env_count = 0;
    for (auto& p : procs) {
        CHECK(p.places.size() == 2);
        env_count += p.environment;
    }
    CHECK(env_count == 1);
}
