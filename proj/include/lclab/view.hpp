#pragma once

#include "error.hpp"
#include "grid.hpp"
#include "labels.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lclab {

// The radius-t ball around a node. Nodes at distance t keep only their edges
// towards distance t-1, but every node's own half-edge labels are known.
struct View {
    struct Edge {
        int to;
        EdgeLabel mine, theirs;
    };
    int t = 0;
    std::vector<uint64_t> ids;           // local index 0 is the center
    std::vector<int> dist;
    std::vector<std::vector<Edge>> adj;  // visible edges only
    std::vector<std::vector<EdgeLabel>> labels; // full own labels, sorted
    std::vector<int> global;             // simulator bookkeeping, never canonicalized

    int size() const { return static_cast<int>(ids.size()); }
    long edge_count() const {
        long m = 0;
        for (auto& a : adj) m += static_cast<long>(a.size());
        return m / 2;
    }
};

inline View gather_view(const LabeledGraph& g, int v, int t) {
    if (t < 0) throw Error("invalid-radius");
    View w;
    w.t = t;
    std::vector<int> local(g.size(), -1);
    auto add = [&](int u, int d) {
        local[u] = w.size();
        w.ids.push_back(g.ids[u]);
        w.dist.push_back(d);
        w.global.push_back(u);
        std::vector<EdgeLabel> ls;
        for (auto& h : g.adj[u]) ls.push_back(h.mine);
        std::sort(ls.begin(), ls.end());
        w.labels.push_back(ls);
        w.adj.emplace_back();
    };
    add(v, 0);
    for (int q = 0; q < w.size(); ++q) {
        const int u = w.global[q];
        if (w.dist[q] >= t) continue;
        for (auto& h : g.adj[u])
            if (local[h.to] < 0) add(h.to, w.dist[q] + 1);
    }
    for (int a = 0; a < w.size(); ++a)
        for (auto& h : g.adj[w.global[a]]) {
            const int b = local[h.to];
            if (b < 0) continue;
            if (std::min(w.dist[a], w.dist[b]) <= t - 1) w.adj[a].push_back({b, h.mine, h.theirs});
        }
    return w;
}

inline bool view_complete(const View& w) {
    for (int a = 0; a < w.size(); ++a)
        if (w.adj[a].size() != w.labels[a].size()) return false;
    return true;
}

// Identifier-free canonical string. Nodes are numbered in BFS order from the
// center; ties between neighbours with equal local keys are resolved by
// trying every order and keeping the lexicographically smallest encoding.
inline std::string canonical_view(const View& w, long budget = 200000) {
    const int n = w.size();
    auto label_code = [](EdgeLabel l) { return std::to_string(l.dim) + (l.dir == Dir::Next ? "+" : "-"); };
    std::vector<std::string> own(n);
    for (int a = 0; a < n; ++a) {
        own[a] = "d" + std::to_string(w.dist[a]) + "[";
        for (auto l : w.labels[a]) own[a] += label_code(l);
        own[a] += "]";
    }
    auto edge_key = [&](const View::Edge& e) { return label_code(e.mine) + label_code(e.theirs) + own[e.to]; };

    std::string best;
    bool have_best = false;
    long work = 0;
    std::vector<int> order{0}, number(n, -1);
    number[0] = 0;

    auto encode = [&]() {
        std::string s = "t" + std::to_string(w.t) + ";";
        for (int a : order) {
            s += own[a] + "{";
            std::vector<std::string> es;
            for (auto& e : w.adj[a]) es.push_back(label_code(e.mine) + label_code(e.theirs) + std::to_string(number[e.to]));
            std::sort(es.begin(), es.end());
            for (auto& x : es) s += x + " ";
            s += "}";
        }
        return s;
    };

    // pos: index in `order` whose children are expanded next.
    std::function<void(size_t)> expand = [&](size_t pos) {
        if (++work > budget) throw Error("canonicalization-budget-exceeded");
        if (pos == order.size()) {
            if (static_cast<int>(order.size()) != n) return;
            std::string s = encode();
            if (!have_best || s < best) best = std::move(s), have_best = true;
            return;
        }
        const int a = order[pos];
        std::vector<std::pair<std::string, int>> fresh;
        for (auto& e : w.adj[a])
            if (number[e.to] < 0) fresh.push_back({edge_key(e), e.to});
        std::sort(fresh.begin(), fresh.end());
        fresh.erase(std::unique(fresh.begin(), fresh.end(),
                                [](auto& x, auto& y) { return x.second == y.second; }),
                    fresh.end());
        // Groups of equal keys get permuted; distinct keys keep sorted order.
        std::vector<size_t> group_start{0};
        for (size_t q = 1; q < fresh.size(); ++q)
            if (fresh[q].first != fresh[q - 1].first) group_start.push_back(q);
        group_start.push_back(fresh.size());
        std::function<void(size_t)> place = [&](size_t gi) {
            if (gi + 1 == group_start.size()) {
                expand(pos + 1);
                return;
            }
            std::vector<int> members;
            for (size_t q = group_start[gi]; q < group_start[gi + 1]; ++q) members.push_back(fresh[q].second);
            std::sort(members.begin(), members.end());
            do {
                const size_t mark = order.size();
                bool ok = true;
                for (int u : members) {
                    if (number[u] >= 0) {
                        ok = false;
                        break;
                    }
                    number[u] = static_cast<int>(order.size());
                    order.push_back(u);
                }
                if (ok) place(gi + 1);
                while (order.size() > mark) {
                    number[order.back()] = -1;
                    order.pop_back();
                }
            } while (std::next_permutation(members.begin(), members.end()));
        };
        place(0);
    };
    expand(0);
    return best;
}

// ---------------------------------------------------------------------------
// Lazy execution

// Incrementally grown BFS ball over the real graph. Algorithms read only
// nodes with dist <= t and edges with an endpoint at dist <= t-1.
class Ball {
public:
    explicit Ball(const LabeledGraph& g) : g_(&g), dist_(g.size(), -1), stamp_(g.size(), 0) {}

    void reset(int v) {
        ++epoch_;
        nodes_.clear();
        layer_end_.clear();
        center_ = v;
        t_ = 0;
        touch(v, 0);
        layer_end_.push_back(1);
        complete_ = false;
        complete_known_ = false;
    }

    // Extends the ball by one layer.
    void grow() {
        const size_t begin = t_ == 0 ? 0 : layer_end_[t_ - 1];
        const size_t end = layer_end_[t_];
        for (size_t q = begin; q < end; ++q)
            for (auto& h : g_->adj[nodes_[q]])
                if (stamp_[h.to] != epoch_) touch(h.to, t_ + 1);
        ++t_;
        layer_end_.push_back(nodes_.size());
        complete_known_ = false;
    }

    // True when every node of the ball has all of its edges visible.
    bool complete() {
        if (complete_known_) return complete_;
        complete_known_ = true;
        complete_ = true;
        const size_t begin = t_ == 0 ? 0 : layer_end_[t_ - 1];
        for (size_t q = begin; q < layer_end_[t_] && complete_; ++q)
            for (auto& h : g_->adj[nodes_[q]])
                if (!in_ball(h.to) || dist_[h.to] != t_ - 1) {
                    complete_ = false;
                    break;
                }
        return complete_;
    }

    int t() const { return t_; }
    int center() const { return center_; }
    const LabeledGraph& graph() const { return *g_; }
    const std::vector<int>& nodes() const { return nodes_; }
    bool in_ball(int u) const { return stamp_[u] == epoch_; }
    int dist(int u) const { return in_ball(u) ? dist_[u] : -1; }
    bool edge_visible(int a, int b) const {
        return in_ball(a) && in_ball(b) && std::min(dist_[a], dist_[b]) <= t_ - 1;
    }

private:
    void touch(int u, int d) {
        stamp_[u] = epoch_;
        dist_[u] = d;
        nodes_.push_back(u);
    }

    const LabeledGraph* g_;
    std::vector<int> dist_;
    std::vector<uint32_t> stamp_;
    uint32_t epoch_ = 0;
    std::vector<int> nodes_;
    std::vector<size_t> layer_end_;
    int center_ = 0, t_ = 0;
    bool complete_ = false, complete_known_ = false;
};

// Returns the decision once the ball suffices, nullopt to ask for more.
using LocalAlgorithm = std::function<std::optional<NodeOutput>(Ball&, long claimed_n)>;

struct RunReport {
    OutputLabeling outputs;
    std::vector<int> radius;
    int max_radius = 0;
    bool capped = false;
};

inline RunReport run_algorithm(const LabeledGraph& g, const LocalAlgorithm& alg, long claimed_n) {
    RunReport rep;
    rep.outputs.resize(g.size());
    rep.radius.assign(g.size(), 0);
    Ball ball(g);
    const int cap = g.size() + 1;
    for (int v = 0; v < g.size(); ++v) {
        ball.reset(v);
        for (;;) {
            if (auto out = alg(ball, claimed_n)) {
                rep.outputs[v] = std::move(*out);
                break;
            }
            if (ball.t() >= cap) {
                rep.capped = true;
                break;
            }
            ball.grow();
        }
        rep.radius[v] = ball.t();
        rep.max_radius = std::max(rep.max_radius, ball.t());
    }
    return rep;
}

// Fresh identifiers for nodes created by surgery: tag bit 62, then the
// ordered pair of endpoint identifiers and the index along the segment.
inline uint64_t assign_virtual_ids(uint64_t a, uint64_t b, uint64_t idx) {
    constexpr uint64_t kField = uint64_t{1} << 20;
    if (a == b) throw Error("id-space-exhausted", "endpoints must differ");
    if (a >= kField || b >= kField) throw Error("id-space-exhausted", "endpoint id too large");
    if (idx >= kField) throw Error("id-space-exhausted", "index " + std::to_string(idx));
    return (uint64_t{1} << 62) | (a << 40) | (b << 20) | idx;
}

inline bool is_virtual_id(uint64_t id) { return (id >> 62) & 1; }

} // namespace lclab
