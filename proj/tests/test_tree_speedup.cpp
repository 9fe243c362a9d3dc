#include "lclab/tree_speedup.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace lclab;

namespace {

std::vector<int> dist_from(const Adj& a, int s, int banned = -1) {
    std::vector<int> d(a.size(), -1);
    std::vector<int> q{s};
    d[s] = 0;
    for (size_t k = 0; k < q.size(); ++k)
        for (int u : a[q[k]])
            if (d[u] < 0 && u != banned) d[u] = d[q[k]] + 1, q.push_back(u);
    return d;
}

// u is deleted iff some edge {x, y} has u on y's side and that whole side lies
// within distance tau - 1 of x.
std::vector<char> skeleton_oracle(const Adj& a, int tau) {
    const int n = static_cast<int>(a.size());
    std::vector<char> in(n, 1);
    for (int x = 0; x < n; ++x)
        for (int y : a[x]) {
            const auto d = dist_from(a, y, x);
            int far = 0;
            for (int u = 0; u < n; ++u)
                if (d[u] >= 0) far = std::max(far, d[u] + 1);
            if (far >= tau) continue;
            for (int u = 0; u < n; ++u)
                if (d[u] >= 0) in[u] = 0;
        }
    return in;
}

bool valid(const TreeLcl& p, const Adj& a, const std::vector<int>& lab) { return verify_tree(p, a, lab).empty(); }

} // namespace

TEST(Skeleton, PathGolden) {
    const Adj a = adjacency(path_tree(11));
    const auto s = skeleton(a, 3);
    std::vector<int> kept;
    for (int v = 0; v < 11; ++v)
        if (s.in_skeleton[v]) kept.push_back(v);
    EXPECT_EQ(kept, (std::vector<int>{2, 3, 4, 5, 6, 7, 8}));
    EXPECT_EQ(s.owner[0], 2);
    EXPECT_EQ(s.depth[0], 2);
    EXPECT_EQ(s.owner[10], 8);
}

TEST(Skeleton, MatchesBruteForceOracle) {
    for (uint64_t seed = 1; seed <= 12; ++seed) {
        const Adj a = adjacency(random_tree(60 + 10 * static_cast<int>(seed), seed));
        for (int tau : {2, 3, 5}) {
            const auto s = skeleton(a, tau);
            EXPECT_EQ(s.in_skeleton, skeleton_oracle(a, tau)) << seed << " tau=" << tau;
        }
    }
}

TEST(Skeleton, OwnersAreNearestAndShallow) {
    const Adj a = adjacency(random_tree(300, 6));
    const int tau = skeleton_tau(300, 1.0);
    EXPECT_EQ(tau, 18);
    const auto s = skeleton(a, tau);
    for (int u = 0; u < 300; ++u) {
        const int o = s.owner[u];
        ASSERT_TRUE(s.in_skeleton[o]);
        const auto d = dist_from(a, u);
        EXPECT_EQ(s.depth[u], d[o]);
        EXPECT_LT(s.depth[u], tau);
        for (int v = 0; v < 300; ++v) {
            if (!s.in_skeleton[v]) continue;
            EXPECT_GE(d[v], d[o]);
        }
    }
    long total = 0;
    for (int v = 0; v < 300; ++v)
        if (s.in_skeleton[v]) {
            std::vector<int> nodes;
            const RootedTree t = deleted_tree(a, s, v, &nodes);
            EXPECT_EQ(nodes.front(), v);
            EXPECT_EQ(t.size(), static_cast<int>(nodes.size()));
            total += t.size();
        }
    EXPECT_EQ(total, 300);
}

TEST(Skeleton, SmallTreesAreFullyVisible) {
    try {
        skeleton(adjacency(path_tree(5)), 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "whole-graph-visible");
    }
}

TEST(Decompose, RunsBetweenRulers) {
    for (uint64_t seed = 1; seed <= 8; ++seed) {
        auto g = random_tree(800, seed);
        shuffle_ids(g, seed);
        const Adj a = adjacency(g);
        const auto s = skeleton(a, skeleton_tau(800, 0.5));
        for (int c : {3, 7}) {
            const auto pd = decompose(s, g.ids, c);
            std::set<int> used;
            for (auto& q : pd.Q) {
                EXPECT_GE(static_cast<int>(q.size()), c);
                EXPECT_LE(static_cast<int>(q.size()), 2 * c);
                for (size_t k = 0; k < q.size(); ++k) {
                    EXPECT_TRUE(used.insert(q[k]).second);
                    EXPECT_FALSE(pd.ruler[q[k]]);
                    EXPECT_TRUE(s.in_skeleton[q[k]]);
                    if (k) {
                        const auto& nb = a[q[k]];
                        EXPECT_NE(std::find(nb.begin(), nb.end(), q[k - 1]), nb.end());
                    }
                }
            }
            for (auto& path : pd.paths) {
                EXPECT_TRUE(pd.ruler[path.front()]);
                EXPECT_TRUE(pd.ruler[path.back()]);
                int gap = 0;
                for (int v : path) {
                    gap = pd.ruler[v] ? 0 : gap + 1;
                    EXPECT_LE(gap, 2 * c);
                }
            }
        }
    }
}

// Swapping a fragment for one of the same type keeps every outside partial
// labeling extendible exactly when it was before; a different type does not.
TEST(Replace, SameTypePreservesExtendibility) {
    const TreeLcl p = lcl_two_coloring();
    const Adj g = adjacency(path_tree(20));
    std::vector<uint64_t> ids(20);
    std::iota(ids.begin(), ids.end(), 1);
    std::vector<int> h;
    for (int v = 6; v <= 12; ++v) h.push_back(v);
    auto try_with = [&](int len) {
        const Adj h2 = adjacency(path_tree(len));
        std::vector<uint64_t> ids2;
        for (int k = 0; k < len; ++k) ids2.push_back(1000 + k);
        const auto rep = replace(g, ids, h, {6, 12}, h2, ids2, {0, len - 1});
        EXPECT_EQ(static_cast<int>(rep.adj.size()), 20 - 7 + len);
        EXPECT_TRUE(detail::is_tree(rep.adj));
        std::vector<int> lab_old(20, -1), lab_new(rep.adj.size(), -1);
        lab_old[0] = lab_new[rep.old_index[0]] = 0;
        lab_old[19] = lab_new[rep.old_index[19]] = 0;
        TreeExtender eo(p, g, std::vector<char>(20, 1)), en(p, rep.adj, std::vector<char>(rep.adj.size(), 1));
        return std::make_pair(eo.feasible(lab_old), en.feasible(lab_new));
    };
    TypeRegistry reg(p);
    const int t7 = reg.type_of(Fragment(7, RootedTree{{{}}}));
    for (int len : {9, 11, 8, 10}) {
        const bool same = reg.type_of(Fragment(len, RootedTree{{{}}})) == t7;
        EXPECT_EQ(same, len % 2 == 1);
        auto [before, after] = try_with(len);
        if (same) {
            EXPECT_EQ(before, after) << len;
        } else {
            EXPECT_NE(before, after) << len;
        }
    }
}

TEST(Replace, RejectsMismatchedPoles) {
    const Adj g = adjacency(path_tree(6));
    std::vector<uint64_t> ids{1, 2, 3, 4, 5, 6};
    try {
        replace(g, ids, {2, 3}, {2, 3}, adjacency(path_tree(3)), {7, 8, 9}, {0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "malformed-replacement");
    }
}

TEST(Pump, LengthLandsInTargetWindow) {
    TypeRegistry reg(lcl_three_coloring());
    std::mt19937 rng(4);
    Fragment f;
    for (int k = 0; k < 40; ++k) f.push_back(hanging_trees(3, 2)[rng() % 4]);
    std::vector<int> types;
    for (auto& t : f) types.push_back(reg.tree_type(t));
    for (size_t k = 1; k <= types.size(); ++k) reg.run({types.begin(), types.begin() + k});
    const int ell = reg.size() + 1;
    for (int c : {40, 45})
        for (long long B : {1LL, 7LL, 1000LL}) {
            const PumpPlan plan = pump(reg, f, types, ell, c, B);
            EXPECT_GE(plan.split.x, 2);
            EXPECT_GE(plan.split.z, 2);
            EXPECT_GE(plan.length, c * B);
            EXPECT_LE(plan.length, c * (B + 1));
            EXPECT_EQ(plan.length, 40 + (plan.copies - 1) * plan.split.y);
        }
    // Concrete pumped fragments keep the type.
    const PumpPlan plan = pump(reg, f, types, ell, 40, 2);
    EXPECT_EQ(reg.type_of(pumped_fragment(f, plan.split, plan.copies)), reg.type_of(f));
}

TEST(Pump, TargetRadiusArithmetic) {
    for (int c : {23, 170})
        for (long n : {100L, 500L, 1000L}) {
            const long long B = choose_B(c, n, 0.9);
            auto ok = [&](long double b) {
                return std::pow(static_cast<long double>(c) * (b + 1) * n, static_cast<long double>(0.9)) <= c * b * std::sqrt((long double)n) / 3;
            };
            EXPECT_TRUE(ok(B));
            if (B == 1) continue;
            EXPECT_FALSE(ok(B - 1));
        }
    EXPECT_EQ(tau_orig(1000, 0.5), 32);
    EXPECT_EQ(tau_orig(1024, 0.5), 32);
}

TEST(FillGaps, CompletesPartialLabelings) {
    std::mt19937 rng(2);
    for (auto name : {"3col", "leafnear", "2col"}) {
        const TreeLcl p = tree_lcl(name);
        const Adj a = adjacency(random_tree(150, 9));
        auto lab = p.solve(a);
        for (auto& x : lab)
            if (rng() % 3 == 0) x = -1;
        const auto out = fill_gaps(a, lab, p);
        EXPECT_TRUE(valid(p, a, out)) << name;
        for (size_t v = 0; v < lab.size(); ++v) {
            if (lab[v] < 0) continue;
            EXPECT_EQ(out[v], lab[v]);
        }
    }
}

TEST(Speedup, TrivialRunIsAcceptedWithinBounds) {
    for (int n : {150, 400}) {
        auto g = random_tree(n, static_cast<uint64_t>(n));
        std::shuffle(g.ids.begin(), g.ids.end(), std::mt19937_64(3)); // ids stay below 2^20
        const auto r = speedup_run(g, lcl_trivial());
        EXPECT_TRUE(r.accepted);
        EXPECT_TRUE(r.bounds.size_bound);
        EXPECT_TRUE(r.bounds.branch_count);
        EXPECT_TRUE(r.bounds.pump_oracle);
        EXPECT_EQ(r.c, r.ell_pump + 4);
        const Adj a = adjacency(g);
        for (int v = 0; v < n; v += 17) {
            const auto d = dist_from(a, v);
            EXPECT_LE(r.radius[v], *std::max_element(d.begin(), d.end()));
        }
        EXPECT_NEAR(r.K, r.max_radius / std::sqrt(static_cast<double>(n)), 1e-9);
    }
}

TEST(Speedup, LeafnearIsAcceptedAndDeterministic) {
    const auto g = random_tree(600, 21);
    const auto a = speedup_run(g, lcl_leafnear());
    const auto b = speedup_run(g, lcl_leafnear());
    EXPECT_TRUE(a.accepted);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.radius, b.radius);
    EXPECT_TRUE(valid(lcl_leafnear(), adjacency(g), a.labels));
}

TEST(Speedup, SmallTreesFallBackToBruteForce) {
    SpeedupConfig cfg;
    cfg.c_tau = 2; // tau = 5 marks every edge of a 6-node path
    const auto r = speedup_run(path_tree(6), lcl_leafnear(), cfg);
    EXPECT_TRUE(r.brute_force);
    EXPECT_TRUE(r.accepted);
}

TEST(Speedup, GlobalProblemsNeedAnotherBase) {
    try {
        speedup_run(random_tree(200, 1), lcl_two_coloring());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "unsupported-base");
    }
}

TEST(Speedup, LargeIdentifiersAreRejected) {
    auto g = random_tree(300, 2);
    shuffle_ids(g, 1);
    try {
        speedup_run(g, lcl_trivial());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "id-space-exhausted");
    }
}
