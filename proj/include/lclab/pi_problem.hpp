#pragma once

#include "error.hpp"
#include "grid.hpp"
#include "labelings.hpp"
#include "labels.hpp"
#include "lba.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace lclab {

// The LCL problem built from an LBA M and a dimension count i. Inputs are the
// grid half-edge labels; outputs are the encoding, unbalance and error labels.
struct PiProblem {
    Lba machine; // completed so that every halt goes through the final state
    int dims = 2;
    int radius = 5;

    long input_alphabet_size() const { return 4L * dims; }
    long output_alphabet_size() const {
        const long encoding = machine.num_symbols() + machine.num_states() + 1 + (dims - 1) + 1;
        return encoding + 2 + 1 + 4L * dims;
    }
};

inline PiProblem make_problem(const Lba& m, int i) {
    if (i < 2) throw Error("invalid-dimension", std::to_string(i));
    validate(m);
    return {halt_through_final(m), i, std::max(3, i) + 2};
}

inline bool in_alphabet(const PiProblem& p, const OutLabel& l) {
    switch (l.kind) {
    case Kind::Tape: return l.a >= 0 && l.a < p.machine.num_symbols();
    case Kind::State: return l.a >= 0 && l.a < p.machine.num_states();
    case Kind::Dim: return l.a >= 2 && l.a <= p.dims;
    case Kind::Ptr: return (l.a == 0 || l.a == 1) && l.b >= 1 && l.b <= p.dims && (l.c == 0 || l.c == 1);
    default: return l.a == 0 && l.b == 0 && l.c == 0;
    }
}

// Nodes within distance `rad` of v, v first.
inline std::vector<int> ball_nodes(const LabeledGraph& g, int v, int rad) {
    std::vector<int> out{v};
    std::vector<int> d{0};
    for (size_t q = 0; q < out.size(); ++q) {
        if (d[q] == rad) continue;
        for (auto& h : g.adj[out[q]])
            if (std::find(out.begin(), out.end(), h.to) == out.end()) {
                out.push_back(h.to);
                d.push_back(d[q] + 1);
            }
    }
    return out;
}

// 0 if the node accepts, otherwise the index of the first violated condition.
// grid_ok[u] must hold check_grid_at(g, u) for all u near v.
inline int check_node(const PiProblem& p, const LabeledGraph& g, const OutputLabeling& o,
                      const std::vector<char>& grid_ok, int v) {
    const NodeOutput& out = o[v];

    if (out.empty()) return 1;
    if (out.size() >= 2)
        for (auto& l : out)
            if (!is_encoding(l) || l.kind == Kind::ExemptM) return 1;

    if (grid_ok[v] == has_kind(out, Kind::Error)) return 2;

    if ((has_kind(out, Kind::ExemptM) || has_kind(out, Kind::ExemptU)) && is_origin(g, v)) return 3;

    if (std::all_of(out.begin(), out.end(), is_encoding) && !has_kind(out, Kind::ExemptM)) {
        auto ball = ball_nodes(g, v, 2);
        bool err = std::any_of(ball.begin(), ball.end(), [&](int u) { return any_error_label(o[u]); });
        if (!err) {
            for (int u : ball) {
                if (!std::all_of(o[u].begin(), o[u].end(), is_encoding)) return 4;
                if (!grid_ok[u]) return 4;
            }
            if (!check_encoding(g, o, v, p.machine)) return 4;
        }
    }

    if (out.size() == 1 && out[0].kind == Kind::Unbalanced) {
        auto ball = ball_nodes(g, v, p.dims);
        bool err = std::any_of(ball.begin(), ball.end(), [&](int u) { return any_error_label(o[u]); });
        if (!err) {
            for (int u : ball) {
                if (!std::all_of(o[u].begin(), o[u].end(), is_unbalanced_family)) return 5;
                if (!grid_ok[u]) return 5;
            }
            if (!check_unbalanced(g, o, v)) return 5;
        }
    }

    for (auto& l : out) {
        if (l.kind != Kind::Ptr) continue;
        const EdgeLabel s = l.edge();
        auto u = z_step(g, v, s);
        if (!u) return 6;
        const NodeOutput& next = o[*u];
        if (has_kind(next, Kind::Error)) continue;
        const OutLabel* q = first_of(next, Kind::Ptr);
        if (!q) return 6;
        const EdgeLabel s2 = q->edge();
        if (q->c < l.c) return 6;
        if (l.c == 0 && q->c == 0 && s2 != s) return 6;
        if (l.c == 1 && q->c == 1) {
            if (s2.dim < s.dim) return 6;
            if (s2.dim == s.dim && s2 != s) return 6;
        }
    }
    return 0;
}

struct VerifyResult {
    std::vector<int> rejecting;   // node indices
    std::vector<int> condition;   // parallel to rejecting
    bool accepted() const { return rejecting.empty(); }
};

inline void check_labels(const PiProblem& p, const OutputLabeling& o) {
    for (auto& out : o)
        for (auto& l : out)
            if (!in_alphabet(p, l)) throw Error("malformed-labeling", "label outside the output alphabet");
}

inline VerifyResult verify_all(const PiProblem& p, const LabeledGraph& g, const OutputLabeling& o) {
    if (g.dims != p.dims) throw Error("malformed-labeling", "dimension mismatch");
    if (static_cast<int>(o.size()) != g.size()) throw Error("malformed-labeling", "labeling size mismatch");
    check_labels(p, o);
    const auto grid_ok = grid_check_all(g);
    VerifyResult r;
    for (int v = 0; v < g.size(); ++v)
        if (int c = check_node(p, g, o, grid_ok, v)) {
            r.rejecting.push_back(v);
            r.condition.push_back(c);
        }
    return r;
}

} // namespace lclab
