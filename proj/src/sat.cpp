#include "pgsynt/sat.hpp"

#include <algorithm>
#include <cmath>

namespace pgsynt {

// ---------------------------------------------------------------------------
// Variable heap ordered by activity, ties by smaller id (deterministic).
// ---------------------------------------------------------------------------

bool SatSolver::heap_less(uint32_t a, uint32_t b) const {
    if (activity_[a] != activity_[b]) return activity_[a] < activity_[b];
    return a > b;
}

void SatSolver::heap_insert(uint32_t v) {
    if (heap_pos_[v] >= 0) return;
    heap_pos_[v] = static_cast<int32_t>(heap_.size());
    heap_.push_back(v);
    heap_up(heap_.size() - 1);
}

void SatSolver::heap_up(size_t i) {
    while (i > 0) {
        size_t parent = (i - 1) / 2;
        if (!heap_less(heap_[parent], heap_[i])) break;
        std::swap(heap_[parent], heap_[i]);
        heap_pos_[heap_[parent]] = static_cast<int32_t>(parent);
        heap_pos_[heap_[i]] = static_cast<int32_t>(i);
        i = parent;
    }
}

void SatSolver::heap_down(size_t i) {
    for (;;) {
        size_t l = 2 * i + 1, r = 2 * i + 2, best = i;
        if (l < heap_.size() && heap_less(heap_[best], heap_[l])) best = l;
        if (r < heap_.size() && heap_less(heap_[best], heap_[r])) best = r;
        if (best == i) break;
        std::swap(heap_[best], heap_[i]);
        heap_pos_[heap_[best]] = static_cast<int32_t>(best);
        heap_pos_[heap_[i]] = static_cast<int32_t>(i);
        i = best;
    }
}

uint32_t SatSolver::heap_pop() {
    uint32_t top = heap_[0];
    heap_pos_[top] = -1;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_pos_[heap_[0]] = 0;
        heap_down(0);
    }
    return top;
}

// ---------------------------------------------------------------------------

void SatSolver::ensure_var(uint32_t v) {
    while (assign_.size() <= v) {
        uint32_t nv = static_cast<uint32_t>(assign_.size());
        assign_.push_back(-1);
        // Seed perturbs saved phases only; search order stays activity-driven.
        phase_.push_back(static_cast<int8_t>((seed_ >> (nv % 64)) & 1));
        reason_.push_back(-1);
        level_.push_back(0);
        activity_.push_back(0.0);
        heap_pos_.push_back(-1);
        seen_.push_back(0);
        watches_.emplace_back();
        watches_.emplace_back();
        if (nv >= 1) heap_insert(nv);
    }
}

void SatSolver::attach(int32_t ci) {
    auto& c = clauses_[ci].lits;
    watches_[negate(c[0])].push_back(ci);
    watches_[negate(c[1])].push_back(ci);
}

void SatSolver::add_clause(std::vector<Lit> lits) {
    if (!trail_lim_.empty()) backtrack(0);
    std::vector<ILit> c;
    c.reserve(lits.size());
    for (Lit l : lits) {
        ensure_var(lit_id(l));
        c.push_back(intern(l));
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (size_t i = 0; i + 1 < c.size(); ++i)
        if (c[i] == negate(c[i + 1])) return; // tautology
    // Drop literals already false at root, satisfied clauses are kept simple.
    std::vector<ILit> reduced;
    for (ILit l : c) {
        int8_t a = assign_[var_of(l)];
        bool positive = (l & 1) == 0;
        if (a == -1) { reduced.push_back(l); continue; }
        bool val = a == 1;
        if (val == positive) return; // satisfied at root
    }
    if (reduced.empty()) { unsat_ = true; return; }
    if (reduced.size() == 1) {
        if (!enqueue(reduced[0], -1)) unsat_ = true;
        return;
    }
    clauses_.push_back({std::move(reduced), false});
    attach(static_cast<int32_t>(clauses_.size() - 1));
}

bool SatSolver::enqueue(ILit l, int32_t reason) {
    uint32_t v = var_of(l);
    bool positive = (l & 1) == 0;
    if (assign_[v] != -1) return (assign_[v] == 1) == positive;
    assign_[v] = positive ? 1 : 0;
    reason_[v] = reason;
    level_[v] = static_cast<int32_t>(trail_lim_.size());
    trail_.push_back(l);
    return true;
}

int32_t SatSolver::propagate() {
    while (qhead_ < trail_.size()) {
        ILit l = trail_[qhead_++];
        ++stats_.propagations;
        auto& ws = watches_[l];
        size_t keep = 0;
        for (size_t i = 0; i < ws.size(); ++i) {
            int32_t ci = ws[i];
            auto& c = clauses_[ci].lits;
            // Make sure the falsified literal sits at position 1.
            ILit falsified = negate(l);
            if (c[0] == falsified) std::swap(c[0], c[1]);
            // Already satisfied?
            uint32_t v0 = var_of(c[0]);
            bool pos0 = (c[0] & 1) == 0;
            if (assign_[v0] != -1 && (assign_[v0] == 1) == pos0) {
                ws[keep++] = ci;
                continue;
            }
            // Find a new watch.
            bool moved = false;
            for (size_t k = 2; k < c.size(); ++k) {
                uint32_t vk = var_of(c[k]);
                bool posk = (c[k] & 1) == 0;
                if (assign_[vk] == -1 || (assign_[vk] == 1) == posk) {
                    std::swap(c[1], c[k]);
                    watches_[negate(c[1])].push_back(ci);
                    moved = true;
                    break;
                }
            }
            if (moved) continue;
            ws[keep++] = ci;
            if (!enqueue(c[0], ci)) {
                // Conflict: keep remaining watches and report.
                for (size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
                ws.resize(keep);
                qhead_ = trail_.size();
                return ci;
            }
        }
        ws.resize(keep);
    }
    return -1;
}

void SatSolver::bump(uint32_t v) {
    activity_[v] += bump_inc_;
    if (activity_[v] > 1e100) {
        for (auto& a : activity_) a *= 1e-100;
        bump_inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0) heap_up(static_cast<size_t>(heap_pos_[v]));
}

void SatSolver::decay() { bump_inc_ /= 0.95; }

void SatSolver::analyze(int32_t confl, std::vector<ILit>& learnt, int& backjump) {
    learnt.clear();
    learnt.push_back(0); // slot for the asserting literal
    int counter = 0;
    ILit p = 0;
    size_t index = trail_.size();
    int current_level = static_cast<int>(trail_lim_.size());

    int32_t reason = confl;
    for (;;) {
        // In a reason clause the implied literal sits at position 0 and is
        // skipped; the conflict clause is expanded in full.
        auto& c = clauses_[reason].lits;
        for (size_t i = (p == 0 ? 0 : 1); i < c.size(); ++i) {
            ILit q = c[i];
            uint32_t v = var_of(q);
            if (seen_[v] || level_[v] == 0) continue;
            seen_[v] = 1;
            bump(v);
            if (level_[v] == current_level)
                ++counter;
            else
                learnt.push_back(q);
        }
        // Walk the trail back to the next marked literal.
        while (!seen_[var_of(trail_[index - 1])]) --index;
        p = trail_[--index];
        seen_[var_of(p)] = 0;
        if (--counter == 0) break;
        reason = reason_[var_of(p)];
    }
    learnt[0] = negate(p);

    backjump = 0;
    if (learnt.size() > 1) {
        size_t max_i = 1;
        for (size_t i = 2; i < learnt.size(); ++i)
            if (level_[var_of(learnt[i])] > level_[var_of(learnt[max_i])]) max_i = i;
        std::swap(learnt[1], learnt[max_i]);
        backjump = level_[var_of(learnt[1])];
    }
    for (ILit l : learnt) seen_[var_of(l)] = 0;
}

void SatSolver::backtrack(int level) {
    while (static_cast<int>(trail_lim_.size()) > level) {
        size_t bound = trail_lim_.back();
        trail_lim_.pop_back();
        while (trail_.size() > bound) {
            ILit l = trail_.back();
            trail_.pop_back();
            uint32_t v = var_of(l);
            phase_[v] = assign_[v];
            assign_[v] = -1;
            reason_[v] = -1;
            heap_insert(v);
        }
    }
    qhead_ = trail_.size();
}

SatSolver::ILit SatSolver::pick_branch() {
    while (!heap_.empty()) {
        uint32_t v = heap_pop();
        if (assign_[v] == -1)
            return (v << 1) | (phase_[v] ? 0u : 1u);
    }
    return 0;
}

namespace {
// Luby restart sequence.
uint64_t luby(uint64_t i) {
    uint64_t k = 1;
    while ((1ull << k) - 1 < i + 1) ++k;
    while ((1ull << k) - 1 != i + 1) {
        i -= (1ull << (k - 1)) - 1;
        k = 1;
        while ((1ull << k) - 1 < i + 1) ++k;
    }
    return 1ull << (k - 1);
}
} // namespace

SatSolver::Result SatSolver::solve() {
    if (unsat_) return Result::kUnsat;
    ensure_var(0);
    backtrack(0);
    if (propagate() != -1) {
        unsat_ = true;
        return Result::kUnsat;
    }

    uint64_t restart_round = 0;
    uint64_t conflicts_until_restart = 100 * luby(restart_round);
    uint64_t conflicts_here = 0;
    std::vector<ILit> learnt;

    for (;;) {
        int32_t confl = propagate();
        if (confl != -1) {
            ++stats_.conflicts;
            ++conflicts_here;
            if (trail_lim_.empty()) {
                unsat_ = true;
                return Result::kUnsat;
            }
            int backjump = 0;
            analyze(confl, learnt, backjump);
            backtrack(backjump);
            if (learnt.size() == 1) {
                if (!enqueue(learnt[0], -1)) {
                    unsat_ = true;
                    return Result::kUnsat;
                }
            } else {
                clauses_.push_back({learnt, true});
                int32_t ci = static_cast<int32_t>(clauses_.size() - 1);
                attach(ci);
                enqueue(learnt[0], ci);
            }
            decay();
        } else {
            if (conflicts_here >= conflicts_until_restart) {
                conflicts_here = 0;
                conflicts_until_restart = 100 * luby(++restart_round);
                backtrack(0);
                continue;
            }
            ILit next = pick_branch();
            if (next == 0) return Result::kSat;
            ++stats_.decisions;
            trail_lim_.push_back(trail_.size());
            enqueue(next, -1);
        }
    }
}

bool SatSolver::value(uint32_t var) const {
    if (var >= assign_.size() || assign_[var] == -1) return false;
    return assign_[var] == 1;
}

} // namespace pgsynt
