#pragma once

#include "error.hpp"
#include "tree_lcl.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace lclab {

// A rooted tree with node 0 as the root.
struct RootedTree {
    Adj adj;
    int size() const { return static_cast<int>(adj.size()); }
};

// A path fragment: rooted trees whose roots are joined in sequence.
using Fragment = std::vector<RootedTree>;

struct FragmentGraph {
    Adj adj;
    std::vector<int> roots; // index of each tree's root in adj
};

inline FragmentGraph assemble(const Fragment& f) {
    FragmentGraph h;
    for (auto& t : f) {
        const int base = static_cast<int>(h.adj.size());
        h.roots.push_back(base);
        for (auto& nb : t.adj) {
            h.adj.emplace_back();
            for (int u : nb) h.adj.back().push_back(base + u);
        }
    }
    for (size_t k = 1; k < h.roots.size(); ++k) {
        h.adj[h.roots[k - 1]].push_back(h.roots[k]);
        h.adj[h.roots[k]].push_back(h.roots[k - 1]);
    }
    return h;
}

// Poles of a path fragment inside a larger tree: the two ends of its main
// path, or the single root.
inline std::vector<int> fragment_poles(const FragmentGraph& h) {
    if (h.roots.empty()) return {};
    if (h.roots.size() == 1) return {h.roots[0]};
    return {h.roots.front(), h.roots.back()};
}

inline Fragment concat(Fragment a, const Fragment& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

inline long fragment_size(const Fragment& f) {
    long s = 0;
    for (auto& t : f) s += t.size();
    return s;
}

struct TypeBudget {
    int max_boundary = 12;
    long max_labelings = 1L << 20;
    long max_permutations = 40320;
};

struct FragmentType {
    std::vector<int> d1, d2, d3;
    std::vector<int> boundary;   // d1 in pole order, then d2
    std::vector<char> signature; // indexed by boundary labeling, first node least significant
    std::string key;             // canonical; equal keys iff equivalent
};

namespace detail {

inline long ipow(long b, int e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Exhaustive completion of D3 by backtracking in the given order; a required
// node is checked as soon as its closed neighbourhood is labelled. Used as the
// oracle for the dynamic program, never by it. `budget` caps visited states.
inline bool extendible_exhaustive(const TreeLcl& p, const Adj& h, const std::vector<char>& required,
                                  std::vector<int> lab, const std::vector<int>& free_nodes, long budget) {
    const int n = static_cast<int>(h.size());
    std::vector<int> pos(n, -1);
    for (size_t k = 0; k < free_nodes.size(); ++k) pos[free_nodes[k]] = static_cast<int>(k);
    // due[k]: required nodes whose last free node in N[v] is free_nodes[k]
    std::vector<std::vector<int>> due(free_nodes.size());
    for (int v = 0; v < n; ++v) {
        if (!required[v]) continue;
        int last = pos[v];
        for (int u : h[v]) last = std::max(last, pos[u]);
        if (last < 0) {
            if (!node_ok(p, h, lab, v)) return false;
        } else {
            due[last].push_back(v);
        }
    }
    long visited = 0;
    std::function<bool(size_t)> go = [&](size_t k) {
        if (k == free_nodes.size()) return true;
        for (int l = 0; l < p.sigma; ++l) {
            if (++visited > budget) throw Error("type-budget-exceeded", "exhaustive completion");
            lab[free_nodes[k]] = l;
            bool ok = true;
            for (int v : due[k])
                if (!(ok = node_ok(p, h, lab, v))) break;
            if (ok && go(k + 1)) return true;
        }
        lab[free_nodes[k]] = -1;
        return false;
    };
    return go(0);
}

} // namespace detail

// Tripartition, boundary structure and extendibility signature of (H, F).
// With `exhaustive`, D3 completions are enumerated instead of solved by
// dynamic programming.
inline FragmentType fragment_type(const Adj& h, const std::vector<int>& poles, const TreeLcl& p,
                                  const TypeBudget& budget = {}, bool exhaustive = false) {
    const int n = static_cast<int>(h.size());
    const int r = p.radius;
    std::vector<int> dist(n, -1), queue;
    for (int f : poles) {
        if (f < 0 || f >= n || dist[f] == 0) throw Error("malformed-replacement", "bad pole list");
        dist[f] = 0;
        queue.push_back(f);
    }
    for (size_t q = 0; q < queue.size(); ++q)
        for (int u : h[queue[q]])
            if (dist[u] < 0) dist[u] = dist[queue[q]] + 1, queue.push_back(u);

    FragmentType ft;
    ft.d1 = poles;
    for (int v : queue) {
        if (dist[v] == 0) continue;
        if (dist[v] <= r - 1) ft.d1.push_back(v);
        else if (dist[v] <= 2 * r - 1) ft.d2.push_back(v);
        else ft.d3.push_back(v);
    }
    ft.boundary = ft.d1;
    ft.boundary.insert(ft.boundary.end(), ft.d2.begin(), ft.d2.end());
    const int b = static_cast<int>(ft.boundary.size());
    if (b > budget.max_boundary) throw Error("type-budget-exceeded", "boundary of " + std::to_string(b) + " nodes");
    const long labelings = detail::ipow(p.sigma, b);
    if (labelings > budget.max_labelings) throw Error("type-budget-exceeded", "too many boundary labelings");

    std::vector<char> required(n, 1), fixable(n, 0);
    for (int v : ft.d1) required[v] = 0;
    for (int v : ft.boundary) fixable[v] = 1;

    ft.signature.assign(labelings, 0);
    std::vector<int> lab(n, -1);
    if (exhaustive) {
        for (long code = 0; code < labelings; ++code) {
            long c = code;
            for (int v : ft.boundary) lab[v] = static_cast<int>(c % p.sigma), c /= p.sigma;
            ft.signature[code] = detail::extendible_exhaustive(p, h, required, lab, ft.d3, budget.max_labelings);
        }
    } else {
        TreeExtender ext(p, h, required);
        ext.prepare(fixable);
        for (long code = 0; code < labelings; ++code) {
            long c = code;
            for (int v : ft.boundary) lab[v] = static_cast<int>(c % p.sigma), c /= p.sigma;
            ft.signature[code] = ext.feasible(lab);
        }
    }

    // Canonical key: minimum over orderings of D2 (D1 keeps pole order; for
    // r = 1 it is exactly the pole list).
    const int n1 = static_cast<int>(ft.d1.size());
    std::vector<int> perm(ft.d2.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::string best;
    long tried = 0;
    do {
        if (++tried > budget.max_permutations) throw Error("type-budget-exceeded", "D2 permutations");
        std::vector<int> order(ft.d1);
        for (int k : perm) order.push_back(ft.d2[k]);
        std::string s = "F" + std::to_string(poles.size()) + "/" + std::to_string(n1) + "/" + std::to_string(b) + ":";
        for (int x = 0; x < b; ++x)
            for (int y = x + 1; y < b; ++y) {
                const auto& nb = h[order[x]];
                s += std::find(nb.begin(), nb.end(), order[y]) != nb.end() ? '1' : '0';
            }
        s += ':';
        // position of each original boundary node in `order`
        std::vector<long> place(b);
        for (int x = 0; x < b; ++x)
            for (int y = 0; y < b; ++y)
                if (ft.boundary[y] == order[x]) place[y] = x;
        std::vector<long> weight(b);
        for (int y = 0; y < b; ++y) weight[y] = detail::ipow(p.sigma, static_cast<int>(place[y]));
        std::string sig(labelings, '0');
        for (long code = 0; code < labelings; ++code) {
            long c = code, mapped = 0;
            for (int y = 0; y < b; ++y) mapped += (c % p.sigma) * weight[y], c /= p.sigma;
            sig[mapped] = ft.signature[code] ? '1' : '0';
        }
        s += sig;
        if (best.empty() || s < best) best = std::move(s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    ft.key = std::move(best);
    return ft;
}

inline FragmentType fragment_type(const Fragment& f, const TreeLcl& p, const TypeBudget& budget = {},
                                  bool exhaustive = false) {
    auto h = assemble(f);
    return fragment_type(h.adj, fragment_poles(h), p, budget, exhaustive);
}

// Shared table of type ids. A single rooted tree and the one-tree path fragment
// are the same object, so tree types and path types live in one id space.
// The composition table is the finite automaton over tree types.
class TypeRegistry {
public:
    static constexpr int kEmpty = -1;

    TypeRegistry(TreeLcl p, TypeBudget b = {}) : p_(std::move(p)), budget_(b) {}

    int type_of(const Fragment& f) {
        if (f.empty()) return kEmpty;
        auto ft = fragment_type(f, p_, budget_);
        auto it = ids_.find(ft.key);
        if (it != ids_.end()) return it->second;
        const int id = static_cast<int>(reps_.size());
        ids_.emplace(ft.key, id);
        reps_.push_back(f);
        keys_.push_back(ft.key);
        return id;
    }

    int tree_type(const RootedTree& t) { return type_of(Fragment{t}); }

    int compose(int state, int tree) {
        if (state == kEmpty) return tree;
        auto key = std::make_pair(state, tree);
        auto it = table_.find(key);
        if (it != table_.end()) return it->second;
        Fragment f = reps_.at(state);
        f.push_back(reps_.at(tree).at(0));
        if (reps_.at(tree).size() != 1) throw Error("internal-invariant-violation", "not a tree type");
        const int res = type_of(f);
        table_.emplace(key, res);
        return res;
    }

    // Type of a fragment by running the automaton from the empty state.
    int run(const std::vector<int>& tree_types, int state = kEmpty) {
        for (int t : tree_types) state = compose(state, t);
        return state;
    }

    const Fragment& representative(int id) const { return reps_.at(id); }
    const std::string& key(int id) const { return keys_.at(id); }
    int size() const { return static_cast<int>(reps_.size()); }
    const TreeLcl& lcl() const { return p_; }
    const TypeBudget& budget() const { return budget_; }

private:
    TreeLcl p_;
    TypeBudget budget_;
    std::map<std::string, int> ids_;
    std::vector<Fragment> reps_;
    std::vector<std::string> keys_;
    std::map<std::pair<int, int>, int> table_;
};

struct Automaton {
    std::vector<int> alphabet; // tree type ids
    std::vector<int> states;   // reachable path types, excluding the empty start
    int ell_pump = 0;          // reachable states including the start
};

// Breadth-first closure of the composition table from the empty state.
inline Automaton explore_automaton(TypeRegistry& reg, std::vector<int> alphabet, int max_states = 4096) {
    std::sort(alphabet.begin(), alphabet.end());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
    Automaton a;
    a.alphabet = alphabet;
    std::vector<int> frontier{TypeRegistry::kEmpty};
    std::vector<char> seen;
    auto mark = [&](int s) {
        if (s >= static_cast<int>(seen.size())) seen.resize(s + 1, 0);
        if (seen[s]) return false;
        seen[s] = 1;
        return true;
    };
    for (size_t q = 0; q < frontier.size(); ++q)
        for (int t : alphabet) {
            const int s = reg.compose(frontier[q], t);
            if (mark(s)) {
                a.states.push_back(s);
                frontier.push_back(s);
                if (static_cast<int>(a.states.size()) > max_states)
                    throw Error("type-budget-exceeded", "automaton does not close");
            }
        }
    a.ell_pump = static_cast<int>(a.states.size()) + 1;
    return a;
}

struct PumpSplit {
    int x = 0, y = 0, z = 0; // tree counts
};

// Pigeonhole on the state sequence: the first repeated state after
// `prefix` trees gives x, y, z with prefix <= |x| and |x y| <= prefix + ell.
inline PumpSplit find_pump_decomposition(TypeRegistry& reg, const std::vector<int>& tree_types, int ell,
                                         int prefix = 0) {
    const int k = static_cast<int>(tree_types.size());
    if (k - prefix < ell) throw Error("cannot-pump", std::to_string(k - prefix) + " < " + std::to_string(ell));
    int state = reg.run({tree_types.begin(), tree_types.begin() + prefix});
    std::map<int, int> first{{state, prefix}};
    for (int j = prefix; j < k; ++j) {
        state = reg.compose(state, tree_types[j]);
        auto [it, fresh] = first.emplace(state, j + 1);
        if (!fresh) return {it->second, j + 1 - it->second, k - (j + 1)};
    }
    throw Error("cannot-pump", "no repeated state");
}

// Rooted trees hanging from a main path in a tree of maximum degree
// `max_degree`: the root has at most max_degree - 2 children, other nodes at
// most max_degree - 1. All shapes of height <= h, up to isomorphism.
inline std::vector<RootedTree> hanging_trees(int max_degree, int h, long max_count = 20000) {
    struct Shape {
        std::string code;
        RootedTree t;
    };
    auto attach = [](const std::vector<const Shape*>& kids) {
        Shape s;
        std::vector<std::string> codes;
        for (auto* k : kids) codes.push_back(k->code);
        std::sort(codes.begin(), codes.end());
        s.code = "(";
        for (auto& c : codes) s.code += c;
        s.code += ")";
        s.t.adj.assign(1, {});
        for (auto* k : kids) {
            const int base = s.t.size();
            for (auto& nb : k->t.adj) {
                s.t.adj.emplace_back();
                for (int u : nb) s.t.adj.back().push_back(base + u);
            }
            s.t.adj[0].push_back(base);
            s.t.adj[base].push_back(0);
        }
        return s;
    };
    // shapes of height <= level whose nodes have at most `fan` children
    auto grow = [&](int fan, int height, const std::vector<Shape>& below) {
        std::vector<Shape> out;
        std::vector<const Shape*> kids;
        std::function<void(size_t)> pick = [&](size_t from) {
            out.push_back(attach(kids));
            if (static_cast<long>(out.size()) > max_count) throw Error("type-budget-exceeded", "too many shapes");
            if (static_cast<int>(kids.size()) == fan || height == 0) return;
            for (size_t k = from; k < below.size(); ++k) {
                kids.push_back(&below[k]);
                pick(k);
                kids.pop_back();
            }
        };
        pick(0);
        return out;
    };
    std::vector<Shape> level;
    for (int k = 0; k < h; ++k) level = grow(max_degree - 1, k, level);
    auto roots = grow(max_degree - 2, h, level);
    std::vector<RootedTree> out;
    for (auto& s : roots) out.push_back(std::move(s.t));
    return out;
}

// The automaton of the LCL over the whole tree class: the alphabet holds the
// types of all hanging trees, with the height raised until no new tree type
// appears.
inline Automaton class_automaton(TypeRegistry& reg, int max_degree, int min_height = 2, int max_height = 6) {
    std::vector<int> alphabet;
    size_t seen = 0;
    for (int h = min_height; h <= max_height; ++h) {
        for (auto& t : hanging_trees(max_degree, h)) alphabet.push_back(reg.tree_type(t));
        std::sort(alphabet.begin(), alphabet.end());
        alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
        if (h > min_height && alphabet.size() == seen) return explore_automaton(reg, alphabet);
        seen = alphabet.size();
    }
    throw Error("type-budget-exceeded", "tree types do not stabilise");
}

} // namespace lclab
