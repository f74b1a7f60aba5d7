#include "pgsynt/encoding.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace pgsynt {

// ---------------------------------------------------------------------------
// encode
// ---------------------------------------------------------------------------

Prenex2Qbf encode(const BoundedUnfolding& unf, uint32_t n) {
    if (n < 1) throw Error("encode: n must be at least 1");
    const PetriGame& g = unf.game;
    const uint32_t P = static_cast<uint32_t>(g.num_places());
    const uint32_t T = static_cast<uint32_t>(g.num_transitions());

    Prenex2Qbf out;
    VariableTable& table = out.table;
    uint32_t next = 1;

    // Strategy variables: one per (system place copy, original transition in
    // its folded postset). All copies of a transition leaving the same place
    // copy share that variable, which bakes in justified refusal.
    for (uint32_t pv = 0; pv < P; ++pv) {
        PlaceId p{pv};
        if (!g.is_system(p)) continue;
        std::set<TransId> originals;
        for (auto t : g.place_post(p)) originals.insert(unf.fold(t));
        for (auto o : originals) {
            table.strategy[{p, o}] = next;
            out.exists.push_back(next);
            ++next;
        }
    }
    // Marking variables: (place copy, time 1..n).
    for (uint32_t pv = 0; pv < P; ++pv) {
        for (uint32_t i = 1; i <= n; ++i) {
            table.marking[{PlaceId{pv}, i}] = next;
            out.forall.push_back(next);
            ++next;
        }
    }
    table.num_vars = next - 1;

    Circuit c(table.num_vars);
    auto mv = [&](uint32_t pv, uint32_t i) -> Lit {
        return static_cast<Lit>(table.mvar(PlaceId{pv}, i));
    };

    // allowed(t): conjunction of the strategy variables of the system places
    // in the preset; transitions without system preset are always allowed.
    std::vector<Lit> allowed(T, 0); // 0 = unconditional
    for (uint32_t tv = 0; tv < T; ++tv) {
        TransId t{tv};
        std::vector<Lit> svars;
        for (auto p : g.pre(t))
            if (g.is_system(p))
                svars.push_back(static_cast<Lit>(table.svar(p, unf.fold(t))));
        if (svars.empty())
            allowed[tv] = 0;
        else if (svars.size() == 1)
            allowed[tv] = svars[0];
        else
            allowed[tv] = c.add_and(std::move(svars));
    }

    // enabled(t, i) and chosen(t, i) = enabled /\ allowed.
    std::vector<std::vector<Lit>> enabled_at(n + 1), chosen_at(n + 1);
    for (uint32_t i = 1; i <= n; ++i) {
        enabled_at[i].resize(T);
        chosen_at[i].resize(T);
        for (uint32_t tv = 0; tv < T; ++tv) {
            TransId t{tv};
            std::vector<Lit> conj;
            for (auto p : g.pre(t)) conj.push_back(mv(p.v, i));
            Lit en = conj.size() == 1 ? conj[0] : c.add_and(std::move(conj));
            enabled_at[i][tv] = en;
            chosen_at[i][tv] = allowed[tv] == 0 ? en : c.add_and({en, allowed[tv]});
        }
    }

    // initial: time 1 holds exactly the unfolding's initial places.
    Lit initial;
    {
        std::vector<Lit> conj;
        for (uint32_t pv = 0; pv < P; ++pv)
            conj.push_back(g.is_initial(PlaceId{pv}) ? mv(pv, 1) : -mv(pv, 1));
        initial = c.add_and(std::move(conj));
    }

    // flow_j: some transition is enabled, allowed, and the time-(j+1) marking
    // is exactly the firing result.
    std::vector<Lit> flow(n, 0);
    for (uint32_t j = 1; j + 1 <= n; ++j) {
        std::vector<Lit> fires;
        for (uint32_t tv = 0; tv < T; ++tv) {
            TransId t{tv};
            std::vector<Lit> conj{chosen_at[j][tv]};
            const auto& pre = g.pre(t);
            const auto& post = g.post(t);
            for (uint32_t pv = 0; pv < P; ++pv) {
                PlaceId p{pv};
                bool in_pre = std::binary_search(pre.begin(), pre.end(), p);
                bool in_post = std::binary_search(post.begin(), post.end(), p);
                if (in_post) {
                    conj.push_back(mv(pv, j + 1));
                } else if (in_pre) {
                    conj.push_back(-mv(pv, j + 1));
                } else {
                    // frame: the place keeps its token
                    conj.push_back(c.add_or({-mv(pv, j + 1), mv(pv, j)}));
                    conj.push_back(c.add_or({mv(pv, j + 1), -mv(pv, j)}));
                }
            }
            fires.push_back(c.add_and(std::move(conj)));
        }
        flow[j] = c.add_or(std::move(fires));
    }

    // Pairs of distinct transitions sharing a system preset place.
    std::set<std::pair<uint32_t, uint32_t>> det_pairs;
    for (uint32_t pv = 0; pv < P; ++pv) {
        PlaceId p{pv};
        if (!g.is_system(p)) continue;
        const auto& ts = g.place_post(p);
        for (size_t a = 0; a < ts.size(); ++a)
            for (size_t b = a + 1; b < ts.size(); ++b)
                det_pairs.insert({ts[a].v, ts[b].v});
    }

    std::vector<Lit> win(n + 1, 0);
    for (uint32_t i = 1; i <= n; ++i) {
        std::vector<Lit> nobad;
        for (uint32_t pv = 0; pv < P; ++pv)
            if (g.is_bad(PlaceId{pv})) nobad.push_back(-mv(pv, i));
        Lit nobad_i = c.add_and(std::move(nobad));

        std::vector<Lit> det;
        for (auto [t1, t2] : det_pairs)
            det.push_back(c.add_or({-chosen_at[i][t1], -chosen_at[i][t2]}));
        Lit det_i = c.add_and(std::move(det));

        // deadlock: every transition not enabled or refused by some system
        // preset place; terminating: every transition not enabled.
        std::vector<Lit> dl, term;
        for (uint32_t tv = 0; tv < T; ++tv) {
            term.push_back(-enabled_at[i][tv]);
            if (allowed[tv] == 0)
                dl.push_back(-enabled_at[i][tv]);
            else
                dl.push_back(c.add_or({-enabled_at[i][tv], -allowed[tv]}));
        }
        Lit deadlock_i = c.add_and(std::move(dl));
        Lit terminating_i = c.add_and(std::move(term));
        Lit dlst_i = c.add_or({-deadlock_i, terminating_i});

        win[i] = c.add_and({nobad_i, det_i, dlst_i});
    }

    // loop: the exact marking repeats at two different time points.
    Lit loop;
    {
        std::vector<Lit> pairs;
        for (uint32_t j = 1; j <= n; ++j) {
            for (uint32_t k = j + 1; k <= n; ++k) {
                std::vector<Lit> eq;
                for (uint32_t pv = 0; pv < P; ++pv) eq.push_back(c.add_iff(mv(pv, j), mv(pv, k)));
                pairs.push_back(c.add_and(std::move(eq)));
            }
        }
        loop = c.add_or(std::move(pairs));
    }

    // phi_n
    std::vector<Lit> top;
    Lit seq = initial;
    for (uint32_t i = 1; i <= n; ++i) {
        if (i > 1) seq = c.add_and({seq, flow[i - 1]});
        if (i < n)
            top.push_back(c.add_or({-seq, win[i]}));
        else
            top.push_back(c.add_or({-seq, c.add_and({win[i], loop})}));
    }
    c.set_output(c.add_and(std::move(top)));

    out.matrix = std::move(c);
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// QCIR-G14
// ---------------------------------------------------------------------------

void emit_qcir(const Prenex2Qbf& qbf, std::ostream& sink) {
    sink << "#QCIR-G14\n";
    sink << "exists(";
    for (size_t i = 0; i < qbf.exists.size(); ++i) {
        if (i) sink << ", ";
        sink << qbf.exists[i];
    }
    sink << ")\nforall(";
    for (size_t i = 0; i < qbf.forall.size(); ++i) {
        if (i) sink << ", ";
        sink << qbf.forall[i];
    }
    sink << ")\noutput(" << qbf.matrix.output() << ")\n";
    const Circuit& c = qbf.matrix;
    for (uint32_t gid = c.first_gate_id(); gid <= c.max_id(); ++gid) {
        const Gate& gate = c.gate(gid);
        sink << gid << " = " << (gate.kind == Gate::kAnd ? "and(" : "or(");
        for (size_t i = 0; i < gate.args.size(); ++i) {
            if (i) sink << ", ";
            sink << gate.args[i];
        }
        sink << ")\n";
    }
}

std::string emit_qcir_string(const Prenex2Qbf& qbf) {
    std::ostringstream out;
    emit_qcir(qbf, out);
    return out.str();
}

namespace {

std::vector<std::string> split_args(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (!isspace(static_cast<unsigned char>(ch))) {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

long parse_num(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw Error(std::string("qcir: malformed ") + what + " '" + s + "'");
    }
}

} // namespace

Prenex2Qbf parse_qcir(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("#QCIR", 0) != 0)
        throw Error("qcir: malformed header");

    Prenex2Qbf out;
    bool have_exists = false, have_forall = false, have_output = false;
    Lit output = 0;
    std::vector<std::pair<uint32_t, Gate>> gates;

    while (std::getline(in, line)) {
        // strip comments / blanks
        std::string s;
        for (char ch : line) {
            if (ch == '#') break;
            s += ch;
        }
        size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        s = s.substr(a);

        auto paren = s.find('(');
        auto close = s.rfind(')');
        if (paren == std::string::npos || close == std::string::npos || close < paren)
            throw Error("qcir: malformed line '" + line + "'");
        std::string head = s.substr(0, paren);
        std::string args = s.substr(paren + 1, close - paren - 1);
        // trim head
        while (!head.empty() && isspace(static_cast<unsigned char>(head.back()))) head.pop_back();

        if (head == "exists") {
            for (auto& t : split_args(args)) out.exists.push_back(static_cast<uint32_t>(parse_num(t, "variable")));
            have_exists = true;
        } else if (head == "forall") {
            for (auto& t : split_args(args)) out.forall.push_back(static_cast<uint32_t>(parse_num(t, "variable")));
            have_forall = true;
        } else if (head == "output") {
            output = static_cast<Lit>(parse_num(args, "output literal"));
            have_output = true;
        } else {
            auto eq = head.find('=');
            if (eq == std::string::npos) throw Error("qcir: malformed gate line '" + line + "'");
            std::string idpart = head.substr(0, eq);
            std::string kindpart = head.substr(eq + 1);
            auto strip = [](std::string v) {
                size_t b = v.find_first_not_of(" \t");
                size_t e = v.find_last_not_of(" \t");
                return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
            };
            uint32_t gid = static_cast<uint32_t>(parse_num(strip(idpart), "gate id"));
            std::string kind = strip(kindpart);
            Gate gate;
            if (kind == "and")
                gate.kind = Gate::kAnd;
            else if (kind == "or")
                gate.kind = Gate::kOr;
            else
                throw Error("qcir: unsupported gate kind '" + kind + "'");
            for (auto& t : split_args(args)) gate.args.push_back(static_cast<Lit>(parse_num(t, "literal")));
            gates.emplace_back(gid, std::move(gate));
        }
    }
    if (!have_exists || !have_forall || !have_output)
        throw Error("qcir: missing exists/forall/output block");

    uint32_t num_vars = static_cast<uint32_t>(out.exists.size() + out.forall.size());
    {
        std::set<uint32_t> vars(out.exists.begin(), out.exists.end());
        vars.insert(out.forall.begin(), out.forall.end());
        if (vars.size() != num_vars || (num_vars > 0 && (*vars.begin() != 1 || *vars.rbegin() != num_vars)))
            throw Error("qcir: quantified variables must be the contiguous range 1..V");
    }

    Circuit c(num_vars);
    uint32_t expect = num_vars + 1;
    for (auto& [gid, gate] : gates) {
        if (gid != expect)
            throw Error("qcir: gate ids must be contiguous, got " + std::to_string(gid) +
                        " expected " + std::to_string(expect));
        for (Lit l : gate.args)
            if (lit_id(l) == 0 || lit_id(l) >= gid)
                throw Error("qcir: gate " + std::to_string(gid) +
                            " references undefined or cyclic id " + std::to_string(l));
        c.add_gate(gate.kind, gate.args);
        ++expect;
    }
    if (lit_id(output) == 0 || lit_id(output) > c.max_id())
        throw Error("qcir: output references an undefined id");
    c.set_output(output);
    out.matrix = std::move(c);
    out.validate();
    return out;
}

Prenex2Qbf parse_qcir_string(const std::string& text) {
    std::istringstream in(text);
    return parse_qcir(in);
}

// ---------------------------------------------------------------------------
// Sidecar
// ---------------------------------------------------------------------------

void write_vars_sidecar(const std::string& path, const BoundedUnfolding& unf,
                        const VariableTable& table) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write sidecar '" + path + "'");
    for (const auto& [key, var] : table.strategy)
        out << "svar " << var << " " << unf.game.place_name(key.first) << " "
            << unf.original.trans_name(key.second) << "\n";
    for (const auto& [key, var] : table.marking)
        out << "mvar " << var << " " << unf.game.place_name(key.first) << " " << key.second << "\n";
}

VarsSidecar read_vars_sidecar(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read sidecar '" + path + "'");
    VarsSidecar sc;
    std::string kind;
    while (in >> kind) {
        if (kind == "svar") {
            uint32_t id;
            std::string place, trans;
            if (!(in >> id >> place >> trans)) throw Error("malformed sidecar line");
            sc.svars[id] = {place, trans};
        } else if (kind == "mvar") {
            uint32_t id, time;
            std::string place;
            if (!(in >> id >> place >> time)) throw Error("malformed sidecar line");
            sc.mvars[id] = {place, time};
        } else {
            throw Error("malformed sidecar entry '" + kind + "'");
        }
    }
    return sc;
}

void write_qcir_file(const Prenex2Qbf& qbf, const BoundedUnfolding& unf, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    emit_qcir(qbf, out);
    if (!out) throw Error("write failure on '" + path + "'");
    write_vars_sidecar(path + ".vars", unf, qbf.table);
}

} // namespace pgsynt
