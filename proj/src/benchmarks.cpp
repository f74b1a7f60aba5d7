#include "pgsynt/benchmarks.hpp"

#include <algorithm>
#include <sstream>

namespace pgsynt {

namespace {

struct InvalidSpec : Error { using Error::Error; };

std::string loc(int i) { return std::string(1, static_cast<char>('A' + i)); }
std::string low(int i) { return std::string(1, static_cast<char>('a' + i)); }

// ---------------------------------------------------------------------------
// AS(m): burglar in Env intrudes one of m locations. Each location has an
// alarm process that can test for the intrusion locally, inform all others,
// or jump to its alarm decision uninformed. Alarm place XY means "alarm at X
// indicating an intrusion at Y". Check transitions route premature alarms
// (burglar still at Env) and wrong reports (burglar at LZ, Z != Y) to bad
// places.
// ---------------------------------------------------------------------------

PetriGame gen_as(int m) {
    if (m < 1 || m > 26) throw InvalidSpec("as: m must be in 1..26");
    PetriGame g;
    auto env = g.add_place("Env", false, false, true);
    std::vector<PlaceId> L(m), S(m), D(m), P(m);
    std::vector<std::vector<PlaceId>> A(m, std::vector<PlaceId>(m));
    for (int x = 0; x < m; ++x) L[x] = g.add_place("L" + loc(x), false);
    for (int x = 0; x < m; ++x) S[x] = g.add_place("S" + loc(x), true, false, true);
    for (int x = 0; x < m; ++x) D[x] = g.add_place("S" + loc(x) + loc(x), true);
    for (int x = 0; x < m; ++x) P[x] = g.add_place("p" + loc(x), true);
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y) A[x][y] = g.add_place(loc(x) + loc(y), true);
    auto bad_env = g.add_place("badE", false, true);
    std::vector<PlaceId> bad(m);
    for (int x = 0; x < m; ++x) bad[x] = g.add_place("bad" + loc(x), true, true);

    for (int x = 0; x < m; ++x) {
        auto t = g.add_transition("intrude_" + loc(x));
        g.add_flow(env, t);
        g.add_flow(t, L[x]);
    }
    for (int x = 0; x < m; ++x) {
        auto t = g.add_transition("t_" + loc(x));
        g.add_flow(L[x], t);
        g.add_flow(S[x], t);
        g.add_flow(t, L[x]);
        g.add_flow(t, D[x]);
    }
    for (int x = 0; x < m; ++x) {
        auto t = g.add_transition("fa_" + loc(x));
        g.add_flow(S[x], t);
        g.add_flow(t, P[x]);
    }
    for (int x = 0; x < m; ++x) {
        auto t = g.add_transition("noinfo_" + loc(x));
        g.add_flow(D[x], t);
        g.add_flow(t, P[x]);
    }
    // x detected and informs everyone else; named after the informed parties.
    if (m >= 2) {
        for (int x = 0; x < m; ++x) {
            std::string others;
            for (int y = 0; y < m; ++y)
                if (y != x) others += loc(y);
            auto t = g.add_transition("info_" + others);
            g.add_flow(D[x], t);
            g.add_flow(t, P[x]);
            for (int y = 0; y < m; ++y) {
                if (y == x) continue;
                g.add_flow(S[y], t);
                g.add_flow(t, P[y]);
            }
        }
    }
    for (int x = 0; x < m; ++x) {
        for (int y = 0; y < m; ++y) {
            auto t = g.add_transition(low(x) + low(y));
            g.add_flow(P[x], t);
            g.add_flow(t, A[x][y]);
        }
    }
    // false alarm: alarm raised while the burglar is still at Env
    for (int x = 0; x < m; ++x) {
        for (int y = 0; y < m; ++y) {
            auto t = g.add_transition("cfa_" + loc(x) + loc(y));
            g.add_flow(env, t);
            g.add_flow(A[x][y], t);
            g.add_flow(t, bad_env);
            g.add_flow(t, bad[x]);
        }
    }
    // false report: alarm indicates y but the intrusion is at z
    for (int x = 0; x < m; ++x) {
        for (int y = 0; y < m; ++y) {
            for (int z = 0; z < m; ++z) {
                if (z == y) continue;
                auto t = g.add_transition("cfr_" + loc(x) + loc(y) + "_" + loc(z));
                g.add_flow(L[z], t);
                g.add_flow(A[x][y], t);
                g.add_flow(t, bad_env);
                g.add_flow(t, bad[x]);
            }
        }
    }
    g.finalize();
    return g;
}

// ---------------------------------------------------------------------------
// CM(m,k): the environment declares one of m machines defective; each of the
// k orders hears the announcement, then walks the machine list and grabs a
// working machine. Processing the same machine twice is caught by a check
// transition; walking off the end is a bad place; stalling is a deadlock
// because the announcement or walk steps stay enabled in the unfolding.
// ---------------------------------------------------------------------------

PetriGame gen_cm(int m, int k) {
    if (m < 1 || k < 1) throw InvalidSpec("cm: m and k must be positive");
    auto pos_name = [&](int j, int i, int p) {
        std::string s = "o" + std::to_string(j) + "k" + std::to_string(i);
        if (p > 1) s += "p" + std::to_string(p);
        return s;
    };
    PetriGame g;
    auto env = g.add_place("Env", false, false, true);
    std::vector<PlaceId> def(m);
    for (int i = 0; i < m; ++i) def[i] = g.add_place("def" + std::to_string(i + 1), false);
    std::vector<PlaceId> orders(k);
    for (int j = 0; j < k; ++j)
        orders[j] = g.add_place("o" + std::to_string(j + 1), true, false, true);
    // walk positions, done places, failure places
    std::vector<std::vector<std::vector<PlaceId>>> pos(k);
    std::vector<std::vector<PlaceId>> done(k);
    std::vector<PlaceId> fail(k), bado(k);
    for (int j = 0; j < k; ++j) {
        pos[j].resize(m);
        for (int i = 0; i < m; ++i) {
            pos[j][i].resize(m);
            for (int p = 0; p < m; ++p)
                pos[j][i][p] = g.add_place(pos_name(j + 1, i + 1, p + 1), true);
        }
        done[j].resize(m);
        for (int p = 0; p < m; ++p)
            done[j][p] = g.add_place("o" + std::to_string(j + 1) + "m" + std::to_string(p + 1), true);
        fail[j] = g.add_place("o" + std::to_string(j + 1) + "fail", true, true);
        bado[j] = g.add_place("o" + std::to_string(j + 1) + "bad", true, true);
    }

    for (int i = 0; i < m; ++i) {
        auto t = g.add_transition("d" + std::to_string(i + 1));
        g.add_flow(env, t);
        g.add_flow(t, def[i]);
    }
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < m; ++i) {
            auto t = g.add_transition("ann_o" + std::to_string(j + 1) + "_d" + std::to_string(i + 1));
            g.add_flow(def[i], t);
            g.add_flow(orders[j], t);
            g.add_flow(t, def[i]);
            g.add_flow(t, pos[j][i][0]);
        }
    }
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < m; ++i) {
            for (int p = 0; p < m; ++p) {
                if (p != i) { // taking the defective machine is impossible
                    auto t = g.add_transition("take_o" + std::to_string(j + 1) + "_d" +
                                              std::to_string(i + 1) + "_m" + std::to_string(p + 1));
                    g.add_flow(pos[j][i][p], t);
                    g.add_flow(t, done[j][p]);
                }
                auto t = g.add_transition("pass_o" + std::to_string(j + 1) + "_d" +
                                          std::to_string(i + 1) + "_m" + std::to_string(p + 1));
                g.add_flow(pos[j][i][p], t);
                if (p + 1 < m)
                    g.add_flow(t, pos[j][i][p + 1]);
                else
                    g.add_flow(t, fail[j]);
            }
        }
    }
    // a machine serves at most one order
    for (int p = 0; p < m; ++p) {
        for (int j1 = 0; j1 < k; ++j1) {
            for (int j2 = j1 + 1; j2 < k; ++j2) {
                auto t = g.add_transition("chk_o" + std::to_string(j1 + 1) + "_o" +
                                          std::to_string(j2 + 1) + "_m" + std::to_string(p + 1));
                g.add_flow(done[j1][p], t);
                g.add_flow(done[j2][p], t);
                g.add_flow(t, bado[j1]);
                g.add_flow(t, bado[j2]);
            }
        }
    }
    g.finalize();
    return g;
}

// ---------------------------------------------------------------------------
// DW(m) / DWs(m): the environment hands the document to one clerk; it then
// travels through the remaining clerks in ascending order. Every clerk picks
// an endorse/reject stance up front; disagreement with the incoming verdict
// chain is a bad place. DWs additionally marks the all-reject outcome bad.
// ---------------------------------------------------------------------------

PetriGame gen_dw(int m, bool endorse_only) {
    if (m < 1) throw InvalidSpec("dw: m must be positive");
    PetriGame g;
    auto env = g.add_place("Env", false, false, true);
    std::vector<PlaceId> d0(m), dy(m + 1), dn(m + 1);
    for (int c = 0; c < m; ++c) d0[c] = g.add_place("d" + std::to_string(c + 1) + "f", false);
    // dy[c]/dn[c] is the document arriving at clerk c with an all-yes/all-no
    // verdict so far; index m is the final outcome.
    for (int c = 1; c <= m; ++c) {
        if (c < m) {
            dy[c] = g.add_place("d" + std::to_string(c + 1) + "y", false);
            dn[c] = g.add_place("d" + std::to_string(c + 1) + "n", false);
        }
    }
    dy[m] = g.add_place("endy", false);
    dn[m] = g.add_place("endn", false, endorse_only);
    auto docbad = g.add_place("docbad", false, true);

    std::vector<PlaceId> clerk(m), cy(m), cn(m), yes(m), no(m), cbad(m);
    for (int c = 0; c < m; ++c) {
        std::string n = std::to_string(c + 1);
        clerk[c] = g.add_place("c" + n, true, false, true);
        cy[c] = g.add_place("c" + n + "y", true);
        cn[c] = g.add_place("c" + n + "n", true);
        yes[c] = g.add_place("y" + n, true);
        no[c] = g.add_place("n" + n, true);
        cbad[c] = g.add_place("c" + n + "bad", true, true);
    }

    for (int c = 0; c < m; ++c) {
        auto t = g.add_transition("hand" + std::to_string(c + 1));
        g.add_flow(env, t);
        g.add_flow(t, d0[c]);
    }
    for (int c = 0; c < m; ++c) {
        std::string n = std::to_string(c + 1);
        auto tsy = g.add_transition("sy" + n);
        g.add_flow(clerk[c], tsy);
        g.add_flow(tsy, cy[c]);
        auto tsn = g.add_transition("sn" + n);
        g.add_flow(clerk[c], tsn);
        g.add_flow(tsn, cn[c]);

        auto fy = g.add_transition("fy" + n);
        g.add_flow(d0[c], fy);
        g.add_flow(cy[c], fy);
        g.add_flow(fy, dy[c + 1]);
        g.add_flow(fy, yes[c]);
        auto fn = g.add_transition("fn" + n);
        g.add_flow(d0[c], fn);
        g.add_flow(cn[c], fn);
        g.add_flow(fn, dn[c + 1]);
        g.add_flow(fn, no[c]);

        if (c >= 1) {
            auto ay = g.add_transition("ay" + n);
            g.add_flow(dy[c], ay);
            g.add_flow(cy[c], ay);
            g.add_flow(ay, dy[c + 1]);
            g.add_flow(ay, yes[c]);
            auto an = g.add_transition("an" + n);
            g.add_flow(dn[c], an);
            g.add_flow(cn[c], an);
            g.add_flow(an, dn[c + 1]);
            g.add_flow(an, no[c]);
            auto xy = g.add_transition("xy" + n); // rejects an all-yes chain
            g.add_flow(dy[c], xy);
            g.add_flow(cn[c], xy);
            g.add_flow(xy, docbad);
            g.add_flow(xy, cbad[c]);
            auto xn = g.add_transition("xn" + n); // endorses an all-no chain
            g.add_flow(dn[c], xn);
            g.add_flow(cy[c], xn);
            g.add_flow(xn, docbad);
            g.add_flow(xn, cbad[c]);
        }
    }
    g.finalize();
    return g;
}

// ---------------------------------------------------------------------------
// JP(m): the job walks decision points 1..m; at each the environment either
// routes it to processor i or skips ahead, so the chosen subset is processed
// in ascending order.
// ---------------------------------------------------------------------------

PetriGame gen_jp(int m) {
    if (m < 1) throw InvalidSpec("jp: m must be positive");
    PetriGame g;
    std::vector<PlaceId> j(m + 1), w(m), p(m), f(m);
    for (int i = 0; i <= m; ++i)
        j[i] = g.add_place(i < m ? "j" + std::to_string(i + 1) : "jend", false, false, i == 0);
    for (int i = 0; i < m; ++i) w[i] = g.add_place("w" + std::to_string(i + 1), false);
    for (int i = 0; i < m; ++i)
        p[i] = g.add_place("p" + std::to_string(i + 1), true, false, true);
    for (int i = 0; i < m; ++i) f[i] = g.add_place("f" + std::to_string(i + 1), true);

    for (int i = 0; i < m; ++i) {
        std::string n = std::to_string(i + 1);
        auto inc = g.add_transition("inc" + n);
        g.add_flow(j[i], inc);
        g.add_flow(inc, w[i]);
        auto skip = g.add_transition("skip" + n);
        g.add_flow(j[i], skip);
        g.add_flow(skip, j[i + 1]);
        auto proc = g.add_transition("proc" + n);
        g.add_flow(w[i], proc);
        g.add_flow(p[i], proc);
        g.add_flow(proc, j[i + 1]);
        g.add_flow(proc, f[i]);
    }
    g.finalize();
    return g;
}

// ---------------------------------------------------------------------------
// SR(m,k): m robots each hold one of m tools; the environment destroys k
// tools in sequence (possibly hitting the same robot twice); a robot whose
// tool is destroyed re-equips a tool of its choice.
// ---------------------------------------------------------------------------

PetriGame gen_sr(int m, int k) {
    if (m < 1 || k < 1 || k > m * m) throw InvalidSpec("sr: need m >= 1 and 1 <= k <= m*m");
    PetriGame g;
    std::vector<PlaceId> d(k + 1);
    for (int i = 0; i <= k; ++i)
        d[i] = g.add_place("d" + std::to_string(i), false, false, i == 0);
    std::vector<std::vector<PlaceId>> tool(m, std::vector<PlaceId>(m));
    std::vector<PlaceId> choose(m);
    for (int r = 0; r < m; ++r) {
        for (int t = 0; t < m; ++t)
            tool[r][t] = g.add_place("r" + std::to_string(r + 1) + "t" + std::to_string(t + 1),
                                     true, false, r == t);
        choose[r] = g.add_place("r" + std::to_string(r + 1) + "c", true);
    }
    for (int i = 0; i < k; ++i) {
        for (int r = 0; r < m; ++r) {
            for (int t = 0; t < m; ++t) {
                auto tr = g.add_transition("destroy" + std::to_string(i + 1) + "_r" +
                                           std::to_string(r + 1) + "t" + std::to_string(t + 1));
                g.add_flow(d[i], tr);
                g.add_flow(tool[r][t], tr);
                g.add_flow(tr, d[i + 1]);
                g.add_flow(tr, choose[r]);
            }
        }
    }
    for (int r = 0; r < m; ++r) {
        for (int t = 0; t < m; ++t) {
            auto tr = g.add_transition("equip_r" + std::to_string(r + 1) + "t" +
                                       std::to_string(t + 1));
            g.add_flow(choose[r], tr);
            g.add_flow(tr, tool[r][t]);
        }
    }
    g.finalize();
    return g;
}

} // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::kAS: return "as";
        case Family::kCM: return "cm";
        case Family::kSR: return "sr";
        case Family::kJP: return "jp";
        case Family::kDW: return "dw";
        case Family::kDWs: return "dws";
    }
    return "?";
}

std::string BenchmarkSpec::name() const {
    std::string s = family_name(family) + "_" + std::to_string(m);
    if (family == Family::kCM || family == Family::kSR) s += "_" + std::to_string(k);
    return s;
}

BenchmarkSpec parse_benchmark_spec(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == ':' || ch == '_') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    if (parts.size() < 2) throw Error("benchmark spec '" + text + "': expected family:m[:k]");
    BenchmarkSpec spec;
    std::string fam = parts[0];
    std::transform(fam.begin(), fam.end(), fam.begin(), ::tolower);
    if (fam == "as") spec.family = Family::kAS;
    else if (fam == "cm") spec.family = Family::kCM;
    else if (fam == "sr") spec.family = Family::kSR;
    else if (fam == "jp") spec.family = Family::kJP;
    else if (fam == "dw") spec.family = Family::kDW;
    else if (fam == "dws") spec.family = Family::kDWs;
    else throw Error("unknown benchmark family '" + parts[0] + "'");
    try {
        spec.m = std::stoi(parts[1]);
        bool needs_k = spec.family == Family::kCM || spec.family == Family::kSR;
        if (needs_k) {
            if (parts.size() != 3) throw Error("");
            spec.k = std::stoi(parts[2]);
        } else if (parts.size() != 2) {
            throw Error("");
        }
    } catch (...) {
        throw Error("benchmark spec '" + text + "': expected family:m[:k]");
    }
    return spec;
}

PetriGame generate(const BenchmarkSpec& spec) {
    switch (spec.family) {
        case Family::kAS: return gen_as(spec.m);
        case Family::kCM: return gen_cm(spec.m, spec.k);
        case Family::kSR: return gen_sr(spec.m, spec.k);
        case Family::kJP: return gen_jp(spec.m);
        case Family::kDW: return gen_dw(spec.m, false);
        case Family::kDWs: return gen_dw(spec.m, true);
    }
    throw Error("unreachable");
}

CatalogRow catalog_row(const BenchmarkSpec& spec) {
    CatalogRow row;
    row.spec = spec;
    PetriGame g = generate(spec);
    row.places = g.num_places();
    row.transitions = g.num_transitions();
    row.tokens = g.initial_marking().size();
    return row;
}

std::vector<CatalogRow> list_catalog(const std::vector<BenchmarkSpec>& specs) {
    std::vector<CatalogRow> rows;
    for (const auto& s : specs) rows.push_back(catalog_row(s));
    return rows;
}

} // namespace pgsynt
