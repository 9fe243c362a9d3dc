#pragma once

#include "error.hpp"
#include "grid.hpp"
#include "labels.hpp"
#include "lba.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace lclab {

// ---------------------------------------------------------------------------
// Proof of unbalance

inline bool is_unbalanced_sizes(const std::vector<int>& d) {
    for (size_t j = 1; j < d.size(); ++j)
        if (d[0] >= d[j]) return false;
    return true;
}

inline OutputLabeling unbalanced_labeling(const LabeledGraph& g, const std::vector<int>& d) {
    if (!is_unbalanced_sizes(d)) throw Error("not-unbalanced");
    if (g.coords.empty()) throw Error("missing-coordinates");
    OutputLabeling o(g.size());
    for (int v = 0; v < g.size(); ++v) {
        const auto& c = g.coords[v];
        bool diag = std::all_of(c.begin(), c.end(), [&](int x) { return x == c[0]; });
        o[v] = {diag ? OutLabel::unbalanced() : OutLabel::exempt_u()};
    }
    return o;
}

inline std::vector<EdgeLabel> diagonal(int i, Dir d) {
    std::vector<EdgeLabel> s;
    for (int j = 1; j <= i; ++j) s.push_back({d, j});
    return s;
}

inline bool is_unbalanced_node(const OutputLabeling& o, std::optional<int> v) {
    return v && has_kind(o[*v], Kind::Unbalanced);
}

// Chain rules at an Unbalanced node plus the rule that the origin is Unbalanced.
inline bool check_unbalanced(const LabeledGraph& g, const OutputLabeling& o, int v) {
    const bool unb = has_kind(o[v], Kind::Unbalanced);
    if (is_origin(g, v) && !unb) return false;
    if (!unb) return true;
    const int i = g.dims;
    const bool u_ok = is_unbalanced_node(o, z_walk(g, v, diagonal(i, Dir::Prev)));
    const bool w_ok = is_unbalanced_node(o, z_walk(g, v, diagonal(i, Dir::Next)));
    if (u_ok && w_ok) return true;
    if (w_ok && is_origin(g, v)) return true;
    if (u_ok && !has_label(g, v, Next(1))) {
        bool all = true;
        for (int j = 2; j <= i; ++j) all = all && has_label(g, v, Next(j));
        if (all) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Machine encoding

// Writes the execution of M on the surface spanned by dimensions 1 and k.
// M should already halt through its final state (see halt_through_final).
inline OutputLabeling encode_execution(const LabeledGraph& g, const Lba& m, int k, const std::vector<int>& d) {
    if (k < 2 || k > g.dims) throw Error("invalid-dimension", std::to_string(k));
    if (g.coords.empty()) throw Error("missing-coordinates");
    const int B = d[k - 1] + 1;
    RunResult run_res = run(m, B, d[0]);
    const long rows = std::min<long>(run_res.T, d[0]);
    OutputLabeling o(g.size());
    for (int v = 0; v < g.size(); ++v) {
        const auto& c = g.coords[v];
        bool surface = true;
        for (int j = 1; j < g.dims; ++j)
            if (j != k - 1 && c[j] != 0) surface = false;
        const int x = c[0], y = c[k - 1];
        if (!surface || x > rows) {
            o[v] = {OutLabel::exempt_m()};
            continue;
        }
        const MachineConfig& cfg = run_res.trace[x];
        std::vector<OutLabel> ls{OutLabel::tape(cfg.tape[y]), OutLabel::state(cfg.state), OutLabel::dim(k)};
        if (cfg.head == y) ls.push_back(OutLabel::head());
        o[v] = make_output(ls);
    }
    return o;
}

struct EncCell {
    int k = 0, tape = -1, state = -1;
    bool head = false;
};

// Parsed view of a node whose labels have the Dimension shape; nullopt for
// anything else (Exempt_M, other families, malformed).
inline std::optional<EncCell> enc_cell(const NodeOutput& o, int i, const Lba& m) {
    EncCell c;
    int nd = 0, nt = 0, ns = 0, nh = 0;
    for (auto& l : o) {
        switch (l.kind) {
        case Kind::Dim: ++nd, c.k = l.a; break;
        case Kind::Tape: ++nt, c.tape = l.a; break;
        case Kind::State: ++ns, c.state = l.a; break;
        case Kind::Head: ++nh; break;
        default: return std::nullopt;
        }
    }
    if (nd != 1 || nt != 1 || ns != 1 || nh > 1) return std::nullopt;
    if (c.k < 2 || c.k > i || c.tape < 0 || c.tape >= m.num_symbols() || c.state < 0 || c.state >= m.num_states())
        return std::nullopt;
    c.head = nh == 1;
    return c;
}

inline bool has_dim(const NodeOutput& o, int k) {
    for (auto& l : o)
        if (l.kind == Kind::Dim && l.a == k) return true;
    return false;
}

// Transition taken by a head cell; undefined pairs step into f in place.
inline Transition head_step(const Lba& m, int q, int s) {
    if (const Transition* t = m.find(q, s)) return *t;
    return {m.final_state, s, Move::Stay};
}

// Constraints LC1-LC4 at v. Nodes carrying only Exempt_M pass.
inline bool check_encoding(const LabeledGraph& g, const OutputLabeling& o, int v, const Lba& m) {
    const int i = g.dims;
    if (o[v].size() == 1 && o[v][0].kind == Kind::ExemptM) return true;
    auto cell = enc_cell(o[v], i, m);
    if (!cell) return false;
    const int k = cell->k;

    auto dim_ok = [&](std::optional<int> u) { return !u || has_dim(o[*u], k); };
    auto cell_at = [&](std::optional<int> u) -> std::optional<EncCell> {
        if (!u) return std::nullopt;
        auto c = enc_cell(o[*u], i, m);
        if (c && c->k != k) return std::nullopt;
        return c;
    };
    // Head cell w moved in direction mv in the previous row.
    auto moved = [&](std::optional<int> w, Move mv) {
        auto c = cell_at(w);
        return c && c->head && head_step(m, c->state, c->tape).move == mv;
    };

    for (auto& h : g.adj[v])
        if (h.mine.dir == Dir::Prev && h.mine.dim != 1 && h.mine.dim != k) return false;
    if (!dim_ok(z_step(g, v, Prev(1))) || !dim_ok(z_step(g, v, Prev(k))) || !dim_ok(z_step(g, v, Next(k))))
        return false;

    const bool has_pk = has_label(g, v, Prev(k)), has_nk = has_label(g, v, Next(k));
    if (!has_label(g, v, Prev(1))) {
        if (!has_pk && !(cell->head && cell->tape == m.left)) return false;
        if (has_pk && cell->head) return false;
        if (!has_nk && cell->tape != m.right) return false;
        if (has_pk && has_nk && cell->tape != m.blank) return false;
        if (cell->state != m.initial) return false;
        if (m.initial != m.final_state && !dim_ok(z_step(g, v, Next(1)))) return false;
        return true;
    }

    const auto pu = z_step(g, v, Prev(1));
    const auto prev = cell_at(pu);
    if (prev) {
        if (prev->state == m.final_state) return false;
        if (prev->head) {
            const Transition t = head_step(m, prev->state, prev->tape);
            if (cell->state != t.state || cell->tape != t.symbol) return false;
            std::optional<int> target = v;
            if (t.move == Move::Left) target = z_step(g, v, Prev(k));
            if (t.move == Move::Right) target = z_step(g, v, Next(k));
            auto tc = cell_at(target);
            if (!tc || !tc->head) return false;
        } else {
            if (cell->tape != prev->tape) return false;
            for (auto u : {z_step(g, v, Prev(k)), z_step(g, v, Next(k))}) {
                if (!u) continue;
                auto c = cell_at(u);
                if (!c || c->state != cell->state) return false;
            }
        }
        const bool head_expected = (prev->head && head_step(m, prev->state, prev->tape).move == Move::Stay) ||
                                   moved(z_walk(g, v, {Prev(k), Prev(1)}), Move::Right) ||
                                   moved(z_walk(g, v, {Next(k), Prev(1)}), Move::Left);
        if (cell->head != head_expected) return false;
    }
    if (cell->state != m.final_state && !dim_ok(z_step(g, v, Next(1)))) return false;
    return true;
}

} // namespace lclab
