#pragma once

#include "error.hpp"
#include "grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace lclab {

using Adj = std::vector<std::vector<int>>;

inline Adj adjacency(const LabeledGraph& g) {
    Adj a(g.size());
    for (int v = 0; v < g.size(); ++v)
        for (auto& h : g.adj[v]) a[v].push_back(h.to);
    return a;
}

// Radius-1 LCL on unlabelled trees: a node's verdict depends on its degree,
// its own label and the multiset of its neighbours' labels.
struct TreeLcl {
    std::string name;
    int sigma = 1;
    std::function<bool(int deg, int label, const std::vector<int>& nbr)> ok;
    // Reference solution (used by base algorithms and tests).
    std::function<std::vector<int>(const Adj&)> solve;
    // Radius around v that determines the reference solution at v; -1 if global.
    int local_radius = -1;
    int radius = 1;
};

inline TreeLcl lcl_trivial() {
    return {"trivial", 1, [](int, int, const std::vector<int>&) { return true; },
            [](const Adj& a) { return std::vector<int>(a.size(), 0); }, 0};
}

inline std::vector<int> bfs_order(const Adj& a, int root, std::vector<int>& parent) {
    std::vector<int> order{root};
    parent.assign(a.size(), -1);
    std::vector<char> seen(a.size(), 0);
    seen[root] = 1;
    for (size_t q = 0; q < order.size(); ++q)
        for (int u : a[order[q]])
            if (!seen[u]) {
                seen[u] = 1;
                parent[u] = order[q];
                order.push_back(u);
            }
    return order;
}

// Proper 2-colouring; a global problem on trees, used for type tests.
inline TreeLcl lcl_two_coloring() {
    return {"2col", 2,
            [](int, int l, const std::vector<int>& nbr) {
                return std::all_of(nbr.begin(), nbr.end(), [&](int x) { return x != l; });
            },
            [](const Adj& a) {
                std::vector<int> col(a.size(), 0), parent;
                if (a.empty()) return col;
                auto order = bfs_order(a, 0, parent);
                for (int v : order)
                    if (parent[v] >= 0) col[v] = 1 - col[parent[v]];
                return col;
            },
            -1};
}

// Proper 3-colouring.
inline TreeLcl lcl_three_coloring() {
    return {"3col", 3,
            [](int, int l, const std::vector<int>& nbr) {
                return std::all_of(nbr.begin(), nbr.end(), [&](int x) { return x != l; });
            },
            [](const Adj& a) {
                std::vector<int> col(a.size(), 0), parent;
                if (a.empty()) return col;
                auto order = bfs_order(a, 0, parent);
                for (int v : order)
                    if (parent[v] >= 0) col[v] = (col[parent[v]] + 1) % 3;
                return col;
            },
            -1};
}

// 0 = leaf, 1 = adjacent to a leaf, 2 = neither. A single isolated node is a leaf.
inline TreeLcl lcl_leafnear() {
    return {"leafnear", 3,
            [](int deg, int l, const std::vector<int>& nbr) {
                if (deg <= 1) return l == 0;
                bool near = std::any_of(nbr.begin(), nbr.end(), [](int x) { return x == 0; });
                return l == (near ? 1 : 2);
            },
            [](const Adj& a) {
                std::vector<int> out(a.size());
                for (size_t v = 0; v < a.size(); ++v) {
                    if (a[v].size() <= 1) {
                        out[v] = 0;
                        continue;
                    }
                    bool near = std::any_of(a[v].begin(), a[v].end(), [&](int u) { return a[u].size() <= 1; });
                    out[v] = near ? 1 : 2;
                }
                return out;
            },
            2};
}

inline TreeLcl tree_lcl(const std::string& name) {
    if (name == "trivial") return lcl_trivial();
    if (name == "2col") return lcl_two_coloring();
    if (name == "3col") return lcl_three_coloring();
    if (name == "leafnear") return lcl_leafnear();
    throw Error("unknown-lcl", name);
}

inline bool node_ok(const TreeLcl& p, const Adj& a, const std::vector<int>& lab, int v) {
    std::vector<int> nbr;
    for (int u : a[v]) nbr.push_back(lab[u]);
    return lab[v] >= 0 && lab[v] < p.sigma && p.ok(static_cast<int>(a[v].size()), lab[v], nbr);
}

inline std::vector<int> verify_tree(const TreeLcl& p, const Adj& a, const std::vector<int>& lab) {
    std::vector<int> bad;
    for (int v = 0; v < static_cast<int>(a.size()); ++v)
        if (!node_ok(p, a, lab, v)) bad.push_back(v);
    return bad;
}

// Completion of partial labelings by tree dynamic programming. deg[v] is the
// degree the checker sees, which exceeds the local degree at nodes that are
// attached to the rest of a larger tree. Only nodes with required[v] are
// checked.
class TreeExtender {
public:
    TreeExtender(const TreeLcl& p, const Adj& a, std::vector<char> required, std::vector<int> deg = {})
        : p_(&p), a_(&a), deg_(std::move(deg)), required_(std::move(required)) {
        const int n = static_cast<int>(a.size());
        if (deg_.empty())
            for (auto& x : a) deg_.push_back(static_cast<int>(x.size()));
        S_ = p.sigma;
        if (n == 0) return;
        order_ = bfs_order(a, 0, parent_);
        if (static_cast<int>(order_.size()) != n) throw Error("not-a-tree");
        children_.assign(n, {});
        for (int v = 0; v < n; ++v)
            for (int u : a[v])
                if (u != parent_[v]) children_[v].push_back(u);
        feas_.assign(n, std::vector<char>(static_cast<size_t>(S_) * (S_ + 1), 0));
        choice_.assign(n, std::vector<std::vector<int>>(static_cast<size_t>(S_) * (S_ + 1)));
        dirty_.assign(n, 1);
    }

    // Nodes outside every subtree that contains a node of `fixable` get their
    // tables computed once; later calls only revisit the others.
    void prepare(const std::vector<char>& fixable) {
        const int n = static_cast<int>(order_.size());
        dirty_.assign(n, 0);
        for (int q = n - 1; q >= 0; --q) {
            const int v = order_[q];
            if (fixable[v]) dirty_[v] = 1;
            if (dirty_[v] && parent_[v] >= 0) dirty_[parent_[v]] = 1;
        }
        std::vector<int> none(n, -1);
        for (int q = n - 1; q >= 0; --q)
            if (!dirty_[order_[q]]) compute(order_[q], none);
    }

    bool feasible(const std::vector<int>& lab) {
        if (order_.empty()) return true;
        for (int q = static_cast<int>(order_.size()) - 1; q >= 0; --q)
            if (dirty_[order_[q]]) compute(order_[q], lab);
        return root_label() >= 0;
    }

    // Fills every -1 entry; false when no completion exists.
    bool extend(std::vector<int>& lab) {
        if (order_.empty()) return true;
        dirty_.assign(order_.size(), 1);
        if (!feasible(lab)) return false;
        const int root = order_[0];
        lab[root] = root_label();
        for (int v : order_) {
            const auto& combo = choice_[v][cell(lab[v], parent_[v] < 0 ? S_ : lab[parent_[v]])];
            for (size_t k = 0; k < children_[v].size(); ++k) lab[children_[v][k]] = combo[k];
        }
        return true;
    }

private:
    size_t cell(int lv, int lp) const { return static_cast<size_t>(lv) * (S_ + 1) + lp; }

    int root_label() const {
        const int root = order_[0];
        for (int l = 0; l < S_; ++l)
            if (feas_[root][cell(l, S_)]) return l;
        return -1;
    }

    // feas_[v][cell(lv, lp)]: the subtree of v has a completion with v
    // labelled lv while its parent holds lp (lp == S_: v is the root).
    void compute(int v, const std::vector<int>& lab) {
        const auto& ch = children_[v];
        std::fill(feas_[v].begin(), feas_[v].end(), 0);
        for (int lv = 0; lv < S_; ++lv) {
            if (lab[v] >= 0 && lab[v] != lv) continue;
            for (int lp = 0; lp <= S_; ++lp) {
                if ((lp == S_) != (parent_[v] < 0)) continue;
                const size_t c = cell(lv, lp);
                if (!required_[v]) {
                    combo_.clear();
                    bool all = true;
                    for (int u : ch) {
                        int pick = -1;
                        for (int lc = 0; lc < S_ && pick < 0; ++lc)
                            if (feas_[u][cell(lc, lv)]) pick = lc;
                        if (pick < 0) {
                            all = false;
                            break;
                        }
                        combo_.push_back(pick);
                    }
                    if (all) feas_[v][c] = 1, choice_[v][c] = combo_;
                    continue;
                }
                combo_.assign(ch.size(), 0);
                for (;;) {
                    bool valid = true;
                    for (size_t k = 0; k < ch.size() && valid; ++k) valid = feas_[ch[k]][cell(combo_[k], lv)];
                    if (valid) {
                        nbr_ = combo_;
                        if (lp < S_) nbr_.push_back(lp);
                        if (p_->ok(deg_[v], lv, nbr_)) {
                            feas_[v][c] = 1;
                            choice_[v][c] = combo_;
                            break;
                        }
                    }
                    size_t k = 0;
                    while (k < combo_.size() && ++combo_[k] == S_) combo_[k++] = 0;
                    if (k == combo_.size()) break;
                }
            }
        }
    }

    const TreeLcl* p_;
    const Adj* a_;
    std::vector<int> deg_;
    std::vector<char> required_;
    int S_ = 1;
    std::vector<int> order_, parent_;
    std::vector<std::vector<int>> children_;
    std::vector<std::vector<char>> feas_;
    std::vector<std::vector<std::vector<int>>> choice_;
    std::vector<char> dirty_;
    std::vector<int> combo_, nbr_;
};

// ---------------------------------------------------------------------------
// Tree generators. Half-edge labels are irrelevant for trees; parent sides
// carry (Next,1).

inline LabeledGraph tree_from_parents(const std::vector<int>& parent) {
    LabeledGraph g;
    g.dims = 1;
    for (size_t v = 0; v < parent.size(); ++v) g.add_node(v + 1);
    for (size_t v = 0; v < parent.size(); ++v)
        if (parent[v] >= 0) g.add_edge(parent[v], static_cast<int>(v), Next(1), Prev(1));
    return g;
}

inline LabeledGraph path_tree(int n) {
    std::vector<int> p(n);
    for (int v = 0; v < n; ++v) p[v] = v - 1;
    return tree_from_parents(p);
}

inline LabeledGraph star_tree(int n) {
    std::vector<int> p(n, 0);
    p[0] = -1;
    return tree_from_parents(p);
}

// A long spine (most of the nodes) with short side branches hanging from it
// and, occasionally, a long branch. Maximum degree 3.
inline LabeledGraph random_tree(int n, uint64_t seed) {
    if (n < 2) throw Error("invalid-size", "random tree needs n >= 2");
    std::mt19937_64 rng(seed);
    std::vector<int> parent;
    std::vector<int> deg;
    auto add = [&](int p) {
        parent.push_back(p);
        deg.push_back(0);
        if (p >= 0) ++deg[p], ++deg.back();
        return static_cast<int>(parent.size()) - 1;
    };
    const int spine = std::max(2, static_cast<int>(n * (0.65 + 0.15 * (rng() % 1000) / 1000.0)));
    add(-1);
    for (int k = 1; k < spine; ++k) add(k - 1);
    while (static_cast<int>(parent.size()) < n) {
        int at = static_cast<int>(rng() % parent.size());
        if (deg[at] >= 3) continue;
        int len = rng() % 10 == 0 ? static_cast<int>(std::sqrt(static_cast<double>(n))) + static_cast<int>(rng() % 8)
                                  : 1 + static_cast<int>(rng() % 3);
        int cur = at;
        for (int k = 0; k < len && static_cast<int>(parent.size()) < n; ++k) {
            if (deg[cur] >= 3) break;
            cur = add(cur);
        }
    }
    return tree_from_parents(parent);
}

} // namespace lclab
