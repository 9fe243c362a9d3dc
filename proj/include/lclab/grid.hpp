#pragma once

#include "error.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace lclab {

enum class Dir : uint8_t { Prev = 0, Next = 1 };

struct EdgeLabel {
    Dir dir = Dir::Next;
    int dim = 1;

    bool operator==(const EdgeLabel&) const = default;
    auto operator<=>(const EdgeLabel& o) const {
        if (dim != o.dim) return dim <=> o.dim;
        return dir <=> o.dir;
    }
    EdgeLabel opposite() const { return {dir == Dir::Prev ? Dir::Next : Dir::Prev, dim}; }
};

inline EdgeLabel Prev(int j) { return {Dir::Prev, j}; }
inline EdgeLabel Next(int j) { return {Dir::Next, j}; }

inline std::string to_string(EdgeLabel l) {
    return std::string(l.dir == Dir::Prev ? "Prev" : "Next") + "," + std::to_string(l.dim);
}

struct HalfEdge {
    int to;
    EdgeLabel mine;   // L_v(e) for the owning node v
    EdgeLabel theirs; // L_to(e)
};

// Node indices are 0..n-1 and are an implementation detail; algorithms only
// ever see the identifiers in `ids`. Coordinates are generator metadata.
struct LabeledGraph {
    int dims = 2;
    std::vector<uint64_t> ids;
    std::vector<std::vector<HalfEdge>> adj;
    std::vector<std::vector<int>> coords; // empty when unknown

    int size() const { return static_cast<int>(adj.size()); }
    int degree(int v) const { return static_cast<int>(adj[v].size()); }
    long edge_count() const {
        long m = 0;
        for (auto& a : adj) m += static_cast<long>(a.size());
        return m / 2;
    }

    int add_node(uint64_t id) {
        ids.push_back(id);
        adj.emplace_back();
        return size() - 1;
    }
    void add_edge(int u, int v, EdgeLabel lu, EdgeLabel lv) {
        adj[u].push_back({v, lu, lv});
        adj[v].push_back({u, lv, lu});
    }
    bool adjacent(int u, int v) const {
        for (auto& h : adj[u])
            if (h.to == v) return true;
        return false;
    }
    void set_label(int v, int to, EdgeLabel mine) {
        for (auto& h : adj[v])
            if (h.to == to) h.mine = mine;
        for (auto& h : adj[to])
            if (h.to == v) h.theirs = mine;
    }
    void remove_edge(int u, int v) {
        std::erase_if(adj[u], [&](const HalfEdge& h) { return h.to == v; });
        std::erase_if(adj[v], [&](const HalfEdge& h) { return h.to == u; });
    }
    int index_of(uint64_t id) const {
        for (int v = 0; v < size(); ++v)
            if (ids[v] == id) return v;
        return -1;
    }
};

inline constexpr long kMaxNodes = 2'000'000;

// Lattice with `extent[j]` nodes along dimension j+1; wrapped dimensions
// close into cycles.
inline LabeledGraph build_lattice(const std::vector<int>& extent, const std::vector<bool>& wrap) {
    const int i = static_cast<int>(extent.size());
    long n = 1;
    for (int e : extent) {
        n *= e;
        if (n > kMaxNodes) throw Error("instance-too-large", std::to_string(n) + " nodes");
    }
    LabeledGraph g;
    g.dims = i;
    g.ids.resize(n);
    std::iota(g.ids.begin(), g.ids.end(), uint64_t{1});
    g.adj.resize(n);
    g.coords.assign(n, std::vector<int>(i));
    std::vector<long> stride(i, 1);
    for (int j = 1; j < i; ++j) stride[j] = stride[j - 1] * extent[j - 1];
    for (long v = 0; v < n; ++v)
        for (int j = 0; j < i; ++j) g.coords[v][j] = static_cast<int>((v / stride[j]) % extent[j]);
    for (long v = 0; v < n; ++v)
        for (int j = 0; j < i; ++j) {
            int c = g.coords[v][j];
            if (c + 1 < extent[j])
                g.add_edge(static_cast<int>(v), static_cast<int>(v + stride[j]), Next(j + 1), Prev(j + 1));
            else if (wrap[j])
                g.add_edge(static_cast<int>(v), static_cast<int>(v - c * stride[j]), Next(j + 1), Prev(j + 1));
        }
    return g;
}

// Sizes d_j: coordinates run over 0..d_j.
inline LabeledGraph build_grid(const std::vector<int>& d) {
    if (d.size() < 2) throw Error("invalid-dimension", "need i >= 2");
    std::vector<int> ext;
    for (int x : d) {
        if (x < 1) throw Error("invalid-size", "grid dimension sizes must be >= 1");
        ext.push_back(x + 1);
    }
    return build_lattice(ext, std::vector<bool>(d.size(), false));
}

// Circumferences g_j >= 3.
inline LabeledGraph build_torus(const std::vector<int>& g) {
    if (g.size() < 2) throw Error("invalid-dimension", "need i >= 2");
    for (int x : g)
        if (x < 3) throw Error("invalid-size", "torus circumference must be >= 3");
    return build_lattice(g, std::vector<bool>(g.size(), true));
}

// Grid in the unwrapped dimensions (sizes d_j), cycle of circumference d_j in
// the wrapped ones.
inline LabeledGraph build_cylinder(const std::vector<int>& d, const std::vector<int>& wrapped_dims) {
    std::vector<bool> wrap(d.size(), false);
    for (int j : wrapped_dims) wrap.at(j - 1) = true;
    std::vector<int> ext;
    for (size_t j = 0; j < d.size(); ++j) {
        if (wrap[j] ? d[j] < 3 : d[j] < 1) throw Error("invalid-size", "dimension " + std::to_string(j + 1));
        ext.push_back(wrap[j] ? d[j] : d[j] + 1);
    }
    return build_lattice(ext, wrap);
}

inline std::optional<int> z_step(const LabeledGraph& g, int v, EdgeLabel l) {
    int found = -1;
    for (auto& h : g.adj[v])
        if (h.mine == l) {
            if (found >= 0) return std::nullopt;
            found = h.to;
        }
    if (found < 0) return std::nullopt;
    return found;
}

inline std::optional<int> z_walk(const LabeledGraph& g, int v, const std::vector<EdgeLabel>& seq) {
    std::optional<int> cur = v;
    for (auto l : seq) {
        cur = z_step(g, *cur, l);
        if (!cur) return cur;
    }
    return cur;
}

inline bool has_label(const LabeledGraph& g, int v, EdgeLabel l) {
    for (auto& h : g.adj[v])
        if (h.mine == l) return true;
    return false;
}

inline bool is_origin(const LabeledGraph& g, int v) {
    for (auto& h : g.adj[v])
        if (h.mine.dir == Dir::Prev) return false;
    return true;
}

// The local grid constraints at v. Every walk stays within distance 2 of v.
inline bool check_grid_at(const LabeledGraph& g, int v) {
    const int i = g.dims;
    const auto& a = g.adj[v];
    std::vector<char> seen(2 * i, 0), dim_seen(i + 1, 0);
    for (auto& h : a) {
        if (h.mine.dim < 1 || h.mine.dim > i) return false;
        int code = 2 * (h.mine.dim - 1) + static_cast<int>(h.mine.dir);
        if (seen[code]++) return false;
        dim_seen[h.mine.dim] = 1;
        if (h.theirs != h.mine.opposite()) return false;
    }
    for (int j = 1; j <= i; ++j)
        if (!dim_seen[j]) return false;
    for (auto& e : a)
        for (auto& f : a) {
            if (e.mine.dim == f.mine.dim) continue;
            auto x = z_step(g, e.to, f.mine);
            auto y = z_step(g, f.to, e.mine);
            if (!x || !y || *x != *y) return false;
        }
    return true;
}

inline std::vector<char> grid_check_all(const LabeledGraph& g) {
    std::vector<char> ok(g.size());
    for (int v = 0; v < g.size(); ++v) ok[v] = check_grid_at(g, v);
    return ok;
}

inline bool is_connected(const LabeledGraph& g) {
    if (g.size() == 0) return true;
    std::vector<char> vis(g.size(), 0);
    std::vector<int> st{0};
    vis[0] = 1;
    int cnt = 1;
    while (!st.empty()) {
        int v = st.back();
        st.pop_back();
        for (auto& h : g.adj[v])
            if (!vis[h.to]) {
                vis[h.to] = 1;
                ++cnt;
                st.push_back(h.to);
            }
    }
    return cnt == g.size();
}

// Assigns a fresh random permutation of 1..n (times a stride) as identifiers.
inline void shuffle_ids(LabeledGraph& g, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<uint64_t> ids(g.size());
    std::iota(ids.begin(), ids.end(), uint64_t{1});
    std::shuffle(ids.begin(), ids.end(), rng);
    for (auto& x : ids) x = x * 7919 + (rng() % 7919);
    g.ids = ids;
}

// ---------------------------------------------------------------------------
// Corruptions

enum class Mutation { FlipLabel, DeleteEdge, AddChord, DuplicateLabel };

inline Mutation parse_mutation(const std::string& s) {
    if (s == "flip-label") return Mutation::FlipLabel;
    if (s == "delete-edge") return Mutation::DeleteEdge;
    if (s == "add-chord") return Mutation::AddChord;
    if (s == "duplicate-label") return Mutation::DuplicateLabel;
    throw Error("unknown-mutation", s);
}

inline LabeledGraph corrupt(const LabeledGraph& g0, Mutation kind, uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); };
    const int n = g0.size(), i = g0.dims;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        LabeledGraph g = g0;
        int v = pick(n);
        if (g.adj[v].empty()) continue;
        const HalfEdge h = g.adj[v][pick(g.degree(v))];
        switch (kind) {
        case Mutation::FlipLabel: {
            EdgeLabel l;
            do l = EdgeLabel{rng() % 2 ? Dir::Next : Dir::Prev, 1 + pick(i)};
            while (l == h.mine);
            g.set_label(v, h.to, l);
            return g;
        }
        case Mutation::DeleteEdge:
            g.remove_edge(v, h.to);
            if (!is_connected(g)) continue;
            return g;
        case Mutation::AddChord: {
            int u = pick(n);
            if (u == v || g.adjacent(u, v) || g.degree(u) >= 2 * i || g.degree(v) >= 2 * i) continue;
            EdgeLabel lu{rng() % 2 ? Dir::Next : Dir::Prev, 1 + pick(i)};
            EdgeLabel lv{rng() % 2 ? Dir::Next : Dir::Prev, 1 + pick(i)};
            g.add_edge(v, u, lv, lu);
            return g;
        }
        case Mutation::DuplicateLabel: {
            if (g.degree(v) < 2) continue;
            const HalfEdge o = g.adj[v][pick(g.degree(v))];
            if (o.to == h.to || o.mine == h.mine) continue;
            g.set_label(v, h.to, o.mine);
            return g;
        }
        }
    }
    throw Error("mutation-rejected", "no admissible location found");
}

// ---------------------------------------------------------------------------
// Text format

inline EdgeLabel parse_edge_label(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw Error("malformed-graph", "label " + s);
    std::string d = s.substr(0, comma);
    EdgeLabel l;
    if (d == "Prev") l.dir = Dir::Prev;
    else if (d == "Next") l.dir = Dir::Next;
    else throw Error("malformed-graph", "label " + s);
    l.dim = std::stoi(s.substr(comma + 1));
    return l;
}

inline void write_graph(std::ostream& out, const LabeledGraph& g) {
    out << "graph " << g.size() << ' ' << g.edge_count() << ' ' << g.dims << '\n';
    for (int v = 0; v < g.size(); ++v) out << "node " << g.ids[v] << '\n';
    for (int v = 0; v < g.size(); ++v)
        for (auto& h : g.adj[v])
            if (v < h.to)
                out << "edge " << g.ids[v] << ' ' << g.ids[h.to] << ' ' << to_string(h.mine) << ' '
                    << to_string(h.theirs) << '\n';
    if (!g.coords.empty())
        for (int v = 0; v < g.size(); ++v) {
            out << "coord " << g.ids[v];
            for (int c : g.coords[v]) out << ' ' << c;
            out << '\n';
        }
}

inline LabeledGraph parse_graph(std::istream& in) {
    LabeledGraph g;
    std::map<uint64_t, int> index;
    std::string line;
    long declared_n = -1, declared_m = -1;
    auto node = [&](uint64_t id) {
        auto it = index.find(id);
        if (it == index.end()) throw Error("malformed-graph", "unknown node " + std::to_string(id));
        return it->second;
    };
    std::vector<std::pair<int, std::vector<int>>> coords;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "graph") {
            ls >> declared_n >> declared_m >> g.dims;
        } else if (key == "node") {
            uint64_t id;
            ls >> id;
            if (index.count(id)) throw Error("malformed-graph", "duplicate id " + std::to_string(id));
            index[id] = g.add_node(id);
        } else if (key == "edge") {
            uint64_t a, b;
            std::string la, lb;
            if (!(ls >> a >> b >> la >> lb)) throw Error("malformed-graph", line);
            int u = node(a), v = node(b);
            if (u == v || g.adjacent(u, v)) throw Error("malformed-graph", "not simple: " + line);
            g.add_edge(u, v, parse_edge_label(la), parse_edge_label(lb));
        } else if (key == "coord") {
            uint64_t id;
            ls >> id;
            std::vector<int> c;
            for (int x; ls >> x;) c.push_back(x);
            coords.push_back({node(id), c});
        } else {
            throw Error("malformed-graph", "unknown key " + key);
        }
    }
    if (declared_n >= 0 && declared_n != g.size()) throw Error("malformed-graph", "node count mismatch");
    if (declared_m >= 0 && declared_m != g.edge_count()) throw Error("malformed-graph", "edge count mismatch");
    if (!coords.empty()) {
        if (static_cast<int>(coords.size()) != g.size()) throw Error("malformed-graph", "partial coordinates");
        g.coords.assign(g.size(), {});
        for (auto& [v, c] : coords) g.coords[v] = c;
    }
    return g;
}

inline LabeledGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open " + path);
    return parse_graph(in);
}

} // namespace lclab
