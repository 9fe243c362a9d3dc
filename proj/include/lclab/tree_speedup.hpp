#pragma once

#include "error.hpp"
#include "grid.hpp"
#include "tree_lcl.hpp"
#include "tree_types.hpp"
#include "view.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace lclab {

// ---------------------------------------------------------------------------
// Skeleton tree. T' keeps node indices of T, so phi is the identity.

struct SkeletonResult {
    int tau = 0;
    std::vector<char> in_skeleton;
    std::vector<int> owner;                // skeleton node whose T_v holds u (u itself if in T')
    std::vector<int> depth;                // distance to owner
    std::vector<std::vector<int>> deleted; // T_v without v, BFS order from v
    Adj skel;                              // T' adjacency
    int size() const { return static_cast<int>(std::count(in_skeleton.begin(), in_skeleton.end(), 1)); }
};

inline int skeleton_tau(long n, double c_tau) {
    return std::max(1, static_cast<int>(std::ceil(c_tau * std::sqrt(static_cast<double>(n)) - 1e-9)));
}

// far[v][k]: max distance from v into the side of its k-th neighbour,
// computed by rerooting.
inline std::vector<std::vector<int>> branch_heights(const Adj& a) {
    const int n = static_cast<int>(a.size());
    std::vector<std::vector<int>> far(n);
    if (n == 0) return far;
    std::vector<int> parent;
    auto order = bfs_order(a, 0, parent);
    std::vector<int> down(n, 0), up(n, 0);
    for (int q = n - 1; q >= 0; --q) {
        const int v = order[q];
        for (int u : a[v])
            if (u != parent[v]) down[v] = std::max(down[v], down[u] + 1);
    }
    for (int v : order) {
        int best1 = -1, best2 = -1;
        for (int u : a[v]) {
            if (u == parent[v]) continue;
            const int h = down[u] + 1;
            if (h > best1) best2 = best1, best1 = h;
            else if (h > best2) best2 = h;
        }
        for (int u : a[v]) {
            if (u == parent[v]) continue;
            const int sib = (down[u] + 1 == best1) ? best2 : best1;
            up[u] = 1 + std::max({parent[v] >= 0 ? up[v] : 0, sib, 0});
        }
    }
    for (int v = 0; v < n; ++v)
        for (int u : a[v]) far[v].push_back(u == parent[v] ? up[v] : down[u] + 1);
    return far;
}

// Edge {a, b} is marked when, from one endpoint, everything on the other side
// lies at distance < tau.
inline SkeletonResult skeleton(const Adj& a, int tau) {
    const int n = static_cast<int>(a.size());
    SkeletonResult s;
    s.tau = tau;
    s.in_skeleton.assign(n, 0);
    s.owner.assign(n, -1);
    s.depth.assign(n, 0);
    s.deleted.assign(n, {});
    s.skel.assign(n, {});
    const auto far = branch_heights(a);
    for (int v = 0; v < n; ++v)
        for (size_t k = 0; k < a[v].size(); ++k) {
            const int u = a[v][k];
            if (far[v][k] >= tau && far[u][std::find(a[u].begin(), a[u].end(), v) - a[u].begin()] >= tau) {
                s.skel[v].push_back(u);
                s.in_skeleton[v] = 1;
            }
        }
    if (s.size() == 0) throw Error("whole-graph-visible", "skeleton is empty");
    std::vector<int> queue;
    for (int v = 0; v < n; ++v)
        if (s.in_skeleton[v]) s.owner[v] = v, queue.push_back(v);
    for (size_t q = 0; q < queue.size(); ++q) {
        const int v = queue[q];
        for (int u : a[v])
            if (s.owner[u] < 0) {
                s.owner[u] = s.owner[v];
                s.depth[u] = s.depth[v] + 1;
                s.deleted[s.owner[v]].push_back(u);
                queue.push_back(u);
            }
    }
    return s;
}

// T_v as a rooted tree with v at index 0; `nodes` receives the T indices.
inline RootedTree deleted_tree(const Adj& a, const SkeletonResult& s, int v, std::vector<int>* nodes = nullptr) {
    std::vector<int> list{v};
    list.insert(list.end(), s.deleted[v].begin(), s.deleted[v].end());
    std::unordered_map<int, int> local;
    for (size_t k = 0; k < list.size(); ++k) local[list[k]] = static_cast<int>(k);
    RootedTree t;
    t.adj.resize(list.size());
    for (size_t k = 0; k < list.size(); ++k)
        for (int u : a[list[k]]) {
            auto it = local.find(u);
            if (it != local.end()) t.adj[k].push_back(it->second);
        }
    if (nodes) *nodes = std::move(list);
    return t;
}

// ---------------------------------------------------------------------------
// Path decomposition. T'' = T' minus nodes of T'-degree > 2; every path of
// T'' gets rulers at both ends and every (c+1)-th node from the end with the
// smaller identifier. The runs between rulers form Q.

struct PathDecomposition {
    std::vector<std::vector<int>> paths; // T'' components in path order
    std::vector<std::vector<int>> Q;     // main paths, c <= length <= 2c nodes
    std::vector<char> ruler;
    int c = 0;
};

inline PathDecomposition decompose(const SkeletonResult& s, const std::vector<uint64_t>& ids, int c) {
    if (c < 1) throw Error("invalid-config", "c must be positive");
    const int n = static_cast<int>(s.in_skeleton.size());
    PathDecomposition d;
    d.c = c;
    d.ruler.assign(n, 0);
    auto in_t2 = [&](int v) { return s.in_skeleton[v] && s.skel[v].size() <= 2; };
    std::vector<char> seen(n, 0);
    for (int v = 0; v < n; ++v) {
        if (!in_t2(v) || seen[v]) continue;
        // walk to one end of the component
        int end = v, prev = -1;
        for (;;) {
            int next = -1;
            for (int u : s.skel[end])
                if (u != prev && in_t2(u)) next = u;
            if (next < 0 || next == v) break;
            prev = end, end = next;
        }
        std::vector<int> path{end};
        seen[end] = 1;
        for (int cur = end, back = -1;;) {
            int next = -1;
            for (int u : s.skel[cur])
                if (u != back && in_t2(u) && !seen[u]) next = u;
            if (next < 0) break;
            seen[next] = 1;
            path.push_back(next);
            back = cur, cur = next;
        }
        if (ids[path.back()] < ids[path.front()]) std::reverse(path.begin(), path.end());
        d.paths.push_back(path);
    }
    for (auto& path : d.paths) {
        const int L = static_cast<int>(path.size());
        std::vector<int> rulers;
        for (int k = 0; k < L; k += c + 1) rulers.push_back(k);
        if (rulers.back() != L - 1) {
            if (L - 2 - rulers.back() < c && rulers.size() > 1) rulers.pop_back();
            rulers.push_back(L - 1);
        }
        for (int k : rulers) d.ruler[path[k]] = 1;
        for (size_t k = 0; k + 1 < rulers.size(); ++k) {
            const int len = rulers[k + 1] - rulers[k] - 1;
            if (len < c || len > 2 * c) continue;
            d.Q.emplace_back(path.begin() + rulers[k] + 1, path.begin() + rulers[k + 1]);
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Replacement surgery.

struct Replacement {
    Adj adj;
    std::vector<uint64_t> ids;
    std::vector<int> old_index; // per node of G: index in G', -1 if it was in H
    std::vector<int> new_index; // per node of H'
};

// H is given by node indices of G with poles F; H' by its own adjacency and
// poles F'. Edges from F[k] to the outside move to F'[k].
inline Replacement replace(const Adj& g, const std::vector<uint64_t>& ids, const std::vector<int>& h,
                           const std::vector<int>& f, const Adj& h2, const std::vector<uint64_t>& ids2,
                           const std::vector<int>& f2) {
    const int n = static_cast<int>(g.size());
    if (f.size() != f2.size()) throw Error("malformed-replacement", "pole counts differ");
    if (ids2.size() != h2.size()) throw Error("malformed-replacement", "identifier count");
    std::vector<char> in_h(n, 0);
    for (int v : h) in_h[v] = 1;
    std::vector<int> pole_index(n, -1);
    for (size_t k = 0; k < f.size(); ++k) {
        if (!in_h[f[k]]) throw Error("malformed-replacement", "pole outside H");
        pole_index[f[k]] = static_cast<int>(k);
    }
    for (int v : h)
        for (int u : g[v])
            if (!in_h[u] && pole_index[v] < 0) throw Error("malformed-replacement", "non-pole touches the outside");
    for (int v : f) {
        bool touches = false;
        for (int u : g[v]) touches |= !in_h[u];
        if (!touches) throw Error("malformed-replacement", "pole without outside neighbour");
    }
    for (int v : f2)
        if (v < 0 || v >= static_cast<int>(h2.size())) throw Error("malformed-replacement", "bad pole in H'");

    Replacement r;
    r.old_index.assign(n, -1);
    for (int v = 0; v < n; ++v)
        if (!in_h[v]) {
            r.old_index[v] = static_cast<int>(r.ids.size());
            r.ids.push_back(ids[v]);
        }
    for (size_t k = 0; k < h2.size(); ++k) {
        r.new_index.push_back(static_cast<int>(r.ids.size()));
        r.ids.push_back(ids2[k]);
    }
    r.adj.assign(r.ids.size(), {});
    for (int v = 0; v < n; ++v) {
        if (in_h[v]) continue;
        for (int u : g[v]) {
            if (!in_h[u]) r.adj[r.old_index[v]].push_back(r.old_index[u]);
            else r.adj[r.old_index[v]].push_back(r.new_index[f2[pole_index[u]]]);
        }
    }
    for (size_t k = 0; k < h2.size(); ++k)
        for (int u : h2[k]) r.adj[r.new_index[k]].push_back(r.new_index[u]);
    for (size_t k = 0; k < f.size(); ++k)
        for (int u : g[f[k]])
            if (!in_h[u]) r.adj[r.new_index[f2[k]]].push_back(r.old_index[u]);
    return r;
}


// ---------------------------------------------------------------------------
// Pumping.

// Fragment x y^j z for a split of `f` (counts in trees).
inline Fragment pumped_fragment(const Fragment& f, const PumpSplit& s, long j) {
    Fragment out(f.begin(), f.begin() + s.x);
    for (long k = 0; k < j; ++k) out.insert(out.end(), f.begin() + s.x, f.begin() + s.x + s.y);
    out.insert(out.end(), f.begin() + s.x + s.y, f.end());
    return out;
}

struct PumpPlan {
    PumpSplit split;
    long long copies = 1;  // m: occurrences of y in the pumped path
    long long y_nodes = 0; // nodes in one copy of y
    long long length = 0;  // main path length after pumping
};

// Keeps the 2r end trees, finds the repetition inside the middle part and
// repeats y until the main path length reaches [cB, c(B+1)].
inline PumpPlan pump(TypeRegistry& reg, const Fragment& qt, const std::vector<int>& tree_types, int ell, int c,
                     long long B) {
    const int r = reg.lcl().radius;
    const int l = static_cast<int>(qt.size());
    if (l - 4 * r < ell) throw Error("cannot-pump", "main path of " + std::to_string(l) + " trees");
    PumpPlan p;
    p.split = find_pump_decomposition(reg, tree_types, ell, 2 * r);
    if (p.split.x < 2 * r || p.split.z < 2 * r || p.split.y < 1)
        throw Error("internal-invariant-violation", "pump split leaves the middle part");
    for (int k = p.split.x; k < p.split.x + p.split.y; ++k) p.y_nodes += qt[k].size();
    const long double target = static_cast<long double>(c) * B;
    const long double need = std::ceil((target - l) / p.split.y);
    p.copies = 1 + static_cast<long long>(std::max<long double>(0, need));
    p.length = l + (p.copies - 1) * static_cast<long long>(p.split.y);
    if (p.length < target || p.length > static_cast<long double>(c) * (B + 1))
        throw Error("internal-invariant-violation", "pumped length out of range");
    return p;
}

// Smallest B with tau_orig(c(B+1)n) <= cB sqrt(n)/3 for tau_orig(N) = N^e.
inline long long choose_B(int c, long n, double e) {
    auto ok = [&](long double B) {
        const long double N = static_cast<long double>(c) * (B + 1) * n;
        return std::pow(N, static_cast<long double>(e)) <= c * B * std::sqrt(static_cast<long double>(n)) / 3;
    };
    long long lo = 1, hi = 1;
    const long long limit = std::numeric_limits<long long>::max() / 4;
    while (!ok(hi)) {
        if (hi > limit / 2) throw Error("b-search-failed", "no B within range");
        hi *= 2;
    }
    while (lo < hi) {
        const long long mid = lo + (hi - lo) / 2;
        if (ok(mid)) hi = mid;
        else lo = mid + 1;
    }
    return lo;
}

inline long long tau_orig(__int128 N, double e) {
    const long double v = std::ceil(std::pow(static_cast<long double>(N), static_cast<long double>(e)) - 1e-9L);
    return v > 4e18L ? static_cast<long long>(4e18) : static_cast<long long>(v);
}

// Completes every -1 entry so that all nodes of T are locally consistent.
inline std::vector<int> fill_gaps(const Adj& a, std::vector<int> lab, const TreeLcl& p) {
    if (std::find(lab.begin(), lab.end(), -1) == lab.end()) {
        if (!verify_tree(p, a, lab).empty()) throw Error("internal-invariant-violation", "labeling is invalid");
        return lab;
    }
    TreeExtender ext(p, a, std::vector<char>(a.size(), 1));
    if (!ext.extend(lab)) throw Error("internal-invariant-violation", "gap cannot be completed");
    return lab;
}

// ---------------------------------------------------------------------------
// End-to-end speedup.

struct SpeedupConfig {
    double c_tau = 1.0;        // skeleton threshold tau = ceil(c_tau sqrt n)
    int c = 0;                 // 0: ell_pump + 4r
    double tau_exponent = 0.9; // base algorithm radius tau_orig(N) = N^e
    std::string base = "gather";
    int max_degree = 3; // tree class; fixes the automaton alphabet
    bool check_pumps = true;
    TypeBudget budget;
};

struct PumpedQ {
    std::vector<int> main; // main path in T
    std::vector<int> types;
    PumpPlan plan;
    bool oracle_ok = true;
    int oracle_checks = 0;
};

struct BoundsReport {
    __int128 size_S = 0, N = 0;
    bool size_bound = true;
    long branch_paths = 0;
    int branch_max_count = 0;
    double branch_bound = 0;
    bool branch_count = true;
    long far_pairs = 0, far_violations = 0;
    bool amplification = true;
    int oracle_checks = 0;
    bool pump_oracle = true;
};

struct SpeedupReport {
    std::vector<int> labels;
    std::vector<long long> radius;
    long long max_radius = 0;
    double K = 0;
    bool brute_force = false;
    bool accepted = false;
    int n = 0, tau = 0, c = 0, ell_pump = 0, tree_types = 0;
    long long B = 0, tau_orig = 0;
    int paths = 0;
    std::vector<PumpedQ> qs;
    long s_trunc_size = 0;
    BoundsReport bounds;
};

namespace detail {

inline std::vector<int> bfs_dist(const Adj& a, int src) {
    std::vector<int> d(a.size(), -1), queue{src};
    d[src] = 0;
    for (size_t q = 0; q < queue.size(); ++q)
        for (int u : a[queue[q]])
            if (d[u] < 0) d[u] = d[queue[q]] + 1, queue.push_back(u);
    return d;
}

// Weighted distances on a tree (unique paths), pruned beyond `cutoff`.
inline std::vector<__int128> tree_dist(const Adj& a, const std::vector<std::vector<long long>>& w, int src,
                                       __int128 cutoff) {
    std::vector<__int128> d(a.size(), -1);
    std::vector<int> stack{src};
    d[src] = 0;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (size_t k = 0; k < a[v].size(); ++k) {
            const int u = a[v][k];
            if (d[u] >= 0) continue;
            const __int128 du = d[v] + w[v][k];
            if (du > cutoff) continue;
            d[u] = du;
            stack.push_back(u);
        }
    }
    return d;
}

inline bool is_tree(const Adj& a) {
    long m = 0;
    for (auto& x : a) m += static_cast<long>(x.size());
    if (a.empty() || m != 2 * (static_cast<long>(a.size()) - 1)) return false;
    std::vector<int> parent;
    return bfs_order(a, 0, parent).size() == a.size();
}

} // namespace detail

inline SpeedupReport speedup_run(const LabeledGraph& g, const TreeLcl& p, const SpeedupConfig& cfg = {}) {
    if (cfg.base != "gather") throw Error("unknown-base", cfg.base);
    const Adj a = adjacency(g);
    if (!detail::is_tree(a)) throw Error("not-a-tree");
    for (auto& nb : a)
        if (static_cast<int>(nb.size()) > cfg.max_degree) throw Error("invalid-config", "tree exceeds max_degree");
    const int n = static_cast<int>(a.size());
    const int r = p.radius;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    SpeedupReport rep;
    rep.n = n;
    rep.tau = skeleton_tau(n, cfg.c_tau);

    std::vector<int> ecc(n, 0);
    for (int v = 0; v < n; ++v) {
        auto d = detail::bfs_dist(a, v);
        ecc[v] = *std::max_element(d.begin(), d.end());
    }
    auto finish = [&](std::vector<int> lab) {
        rep.labels = std::move(lab);
        rep.accepted = verify_tree(p, a, rep.labels).empty();
        rep.max_radius = *std::max_element(rep.radius.begin(), rep.radius.end());
        rep.K = rep.max_radius / sqrt_n;
        return rep;
    };

    SkeletonResult sk;
    try {
        sk = skeleton(a, rep.tau);
    } catch (const Error& e) {
        if (e.code() != "whole-graph-visible") throw;
        rep.brute_force = true;
        rep.radius.assign(ecc.begin(), ecc.end());
        return finish(fill_gaps(a, std::vector<int>(n, -1), p));
    }
    if (p.local_radius < 0) throw Error("unsupported-base", "gather needs a locally determined reference solution");

    // Tree types on T'' and the automaton of the LCL over the tree class.
    TypeRegistry reg(p, cfg.budget);
    const auto aut = class_automaton(reg, cfg.max_degree);
    std::vector<int> tt(n, -1);
    for (int v = 0; v < n; ++v)
        if (sk.in_skeleton[v] && sk.skel[v].size() <= 2) tt[v] = reg.tree_type(deleted_tree(a, sk, v));
    rep.ell_pump = aut.ell_pump;
    rep.tree_types = static_cast<int>(aut.alphabet.size());
    rep.c = cfg.c ? cfg.c : aut.ell_pump + 4 * r;
    const int c = rep.c;

    const auto dec = decompose(sk, g.ids, c);
    rep.paths = static_cast<int>(dec.paths.size());
    rep.B = choose_B(c, n, cfg.tau_exponent);
    const __int128 N = static_cast<__int128>(c) * (rep.B + 1) * n;
    rep.tau_orig = tau_orig(N, cfg.tau_exponent);

    // Pump every Q.
    std::vector<int> qid(n, -1); // Q^T membership
    std::vector<std::vector<int>> qt_nodes;
    std::vector<Fragment> qt_frag;
    std::vector<std::vector<std::vector<int>>> qt_tree_nodes;
    __int128 size_S = n;
    for (auto& main : dec.Q) {
        PumpedQ q;
        q.main = main;
        Fragment f;
        std::vector<std::vector<int>> tree_nodes;
        std::vector<int> all;
        for (int v : main) {
            std::vector<int> nodes;
            f.push_back(deleted_tree(a, sk, v, &nodes));
            q.types.push_back(tt[v]);
            for (int u : nodes) qid[u] = static_cast<int>(rep.qs.size()), all.push_back(u);
            tree_nodes.push_back(std::move(nodes));
        }
        q.plan = pump(reg, f, q.types, aut.ell_pump, c, rep.B);
        if (cfg.check_pumps) {
            // Brute-force types, independent of the registry's dynamic program.
            const TypeBudget ob{cfg.budget.max_boundary, 1L << 26, cfg.budget.max_permutations};
            const std::string want = fragment_type(f, p, ob, true).key;
            for (int j = 0; j <= 3; ++j) {
                ++q.oracle_checks;
                if (fragment_type(pumped_fragment(f, q.plan.split, j), p, ob, true).key != want) q.oracle_ok = false;
            }
        }
        size_S += static_cast<__int128>(q.plan.copies - 1) * q.plan.y_nodes;
        rep.qs.push_back(std::move(q));
        qt_nodes.push_back(std::move(all));
        qt_frag.push_back(std::move(f));
        qt_tree_nodes.push_back(std::move(tree_nodes));
    }
    rep.bounds.size_S = size_S;
    rep.bounds.N = N;
    rep.bounds.size_bound = size_S <= N;
    for (auto& q : rep.qs) {
        rep.bounds.oracle_checks += q.oracle_checks;
        rep.bounds.pump_oracle = rep.bounds.pump_oracle && q.oracle_ok;
    }

    // Truncated virtual tree: each y appears min(m, 3) times. Balls of
    // radius local_radius around original nodes match those in S.
    Adj s_adj = a;
    std::vector<uint64_t> s_ids = g.ids;
    for (size_t qi = 0; qi < rep.qs.size(); ++qi) {
        const auto& q = rep.qs[qi];
        const auto& sp = q.plan.split;
        const long copies = static_cast<long>(std::min<long long>(q.plan.copies, 3));
        const auto h2 = assemble(pumped_fragment(qt_frag[qi], sp, copies));
        const uint64_t ida = g.ids[q.main.front()], idb = g.ids[q.main.back()];
        std::vector<uint64_t> ids2;
        uint64_t idx = 0;
        auto push_tree = [&](int k, bool copy) {
            for (int u : qt_tree_nodes[qi][k]) ids2.push_back(copy ? assign_virtual_ids(ida, idb, idx++) : g.ids[u]);
        };
        for (int k = 0; k < sp.x + sp.y; ++k) push_tree(k, false);
        for (long j = 1; j < copies; ++j)
            for (int k = sp.x; k < sp.x + sp.y; ++k) push_tree(k, true);
        for (int k = sp.x + sp.y; k < static_cast<int>(q.main.size()); ++k) push_tree(k, false);
        std::unordered_map<uint64_t, int> at;
        for (size_t k = 0; k < s_ids.size(); ++k) at[s_ids[k]] = static_cast<int>(k);
        std::vector<int> h;
        for (int u : qt_nodes[qi]) h.push_back(at.at(g.ids[u]));
        auto rp = replace(s_adj, s_ids, h, {at.at(ida), at.at(idb)}, h2.adj, ids2, fragment_poles(h2));
        s_adj = std::move(rp.adj);
        s_ids = std::move(rp.ids);
    }
    rep.s_trunc_size = static_cast<long>(s_adj.size());
    const auto out_S = p.solve(s_adj);
    std::unordered_map<uint64_t, int> eta_inv;
    for (size_t k = 0; k < s_ids.size(); ++k) eta_inv[s_ids[k]] = static_cast<int>(k);

    // Lambda: T_o and the deleted trees hanging from it.
    std::vector<char> t_o(n, 0), lam(n, 0);
    for (int v = 0; v < n; ++v) t_o[v] = sk.in_skeleton[v] && qid[v] < 0;
    for (auto& q : rep.qs) {
        const int l = static_cast<int>(q.main.size());
        for (int k = 0; k < l; ++k)
            if (k < 2 * r || k >= l - 2 * r) t_o[q.main[k]] = 1;
    }
    std::vector<int> lab(n, -1);
    for (int u = 0; u < n; ++u)
        if (t_o[sk.owner[u]]) {
            lam[u] = 1;
            lab[u] = out_S.at(eta_inv.at(g.ids[u]));
        }
    auto labels = fill_gaps(a, lab, p);

    // Gathering radius per node.
    std::vector<std::vector<long long>> w(n);
    for (int v = 0; v < n; ++v) w[v].assign(a[v].size(), 1);
    for (auto& q : rep.qs) {
        const int s1 = q.main[q.plan.split.x + q.plan.split.y - 1], s2 = q.main[q.plan.split.x + q.plan.split.y];
        const long long heavy = (q.plan.copies - 1) * static_cast<long long>(q.plan.split.y) + 1;
        w[s1][std::find(a[s1].begin(), a[s1].end(), s2) - a[s1].begin()] = heavy;
        w[s2][std::find(a[s2].begin(), a[s2].end(), s1) - a[s2].begin()] = heavy;
    }
    rep.radius.assign(n, 0);
    for (int v = 0; v < n; ++v) {
        if (!sk.in_skeleton[v] || !t_o[v]) continue;
        const auto dt = detail::bfs_dist(a, v);
        const auto ds = detail::tree_dist(a, w, v, rep.tau_orig);
        long long reach = 0;
        std::set<int> touched;
        for (int u = 0; u < n; ++u)
            if (ds[u] >= 0) {
                reach = std::max<long long>(reach, dt[u]);
                if (qid[u] >= 0) touched.insert(qid[u]);
            }
        for (int qi : touched)
            for (int u : qt_nodes[qi]) reach = std::max<long long>(reach, dt[u]);
        rep.radius[v] = std::min<long long>(ecc[v], reach + rep.tau);
    }
    for (int u = 0; u < n; ++u)
        if (lam[u] && !sk.in_skeleton[u])
            rep.radius[u] = std::min<long long>(ecc[u], sk.depth[u] + rep.radius[sk.owner[u]]);
    for (size_t qi = 0; qi < rep.qs.size(); ++qi)
        for (int u : qt_nodes[qi]) {
            if (lam[u]) continue;
            const auto d = detail::bfs_dist(a, u);
            long long rho = 0;
            for (int x : qt_nodes[qi]) rho = std::max<long long>(rho, d[x] + (lam[x] ? rep.radius[x] : 0));
            rep.radius[u] = std::min<long long>(ecc[u], rho);
        }

    // Structural bounds: size of S, high-degree nodes on long skeleton paths,
    // distance amplification between far T_o nodes.
    {
        const int L = rep.tau;
        rep.bounds.branch_bound = sqrt_n / cfg.c_tau;
        for (int leaf = 0; leaf < n; ++leaf) {
            if (!sk.in_skeleton[leaf] || sk.skel[leaf].size() != 1) continue;
            std::vector<std::array<int, 4>> stack{{leaf, -1, 0, 0}}; // node, parent, length, count
            while (!stack.empty()) {
                auto [v, par, len, cnt] = stack.back();
                stack.pop_back();
                if (sk.skel[v].size() > 2) ++cnt;
                if (len >= L) {
                    ++rep.bounds.branch_paths;
                    rep.bounds.branch_max_count = std::max(rep.bounds.branch_max_count, cnt);
                }
                for (int u : sk.skel[v])
                    if (u != par) stack.push_back({u, v, len + 1, cnt});
            }
        }
        rep.bounds.branch_count = rep.bounds.branch_max_count <= rep.bounds.branch_bound;

        const long double far_T = c * sqrt_n;
        const long double far_S = static_cast<long double>(c) * rep.B * sqrt_n / 3;
        const __int128 unbounded = static_cast<__int128>(1) << 120;
        for (int u = 0; u < n; ++u) {
            if (!sk.in_skeleton[u] || !t_o[u]) continue;
            const auto dt = detail::bfs_dist(a, u);
            if (*std::max_element(dt.begin(), dt.end()) < far_T) continue;
            const auto ds = detail::tree_dist(a, w, u, unbounded);
            for (int v = u + 1; v < n; ++v) {
                if (!sk.in_skeleton[v] || !t_o[v] || dt[v] < far_T) continue;
                ++rep.bounds.far_pairs;
                if (static_cast<long double>(ds[v]) < far_S) ++rep.bounds.far_violations;
            }
        }
        rep.bounds.amplification = rep.bounds.far_violations == 0;
    }
    return finish(std::move(labels));
}

} // namespace lclab
