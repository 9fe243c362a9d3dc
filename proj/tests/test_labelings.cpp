#include "lclab/labelings.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

using namespace lclab;

namespace {

int node_at(const LabeledGraph& g, const std::vector<int>& c) {
    for (int v = 0; v < g.size(); ++v)
        if (g.coords[v] == c) return v;
    return -1;
}

bool encoding_ok_everywhere(const LabeledGraph& g, const OutputLabeling& o, const Lba& m) {
    for (int v = 0; v < g.size(); ++v)
        if (!check_encoding(g, o, v, m)) return false;
    return true;
}

bool unbalanced_ok_everywhere(const LabeledGraph& g, const OutputLabeling& o) {
    for (int v = 0; v < g.size(); ++v)
        if (!check_unbalanced(g, o, v)) return false;
    return true;
}

// Worst-case style sizes: d_1 = T(d_k + 1), the rest chosen freely.
std::vector<int> sizes_for(const Lba& m, std::vector<int> d, int k) {
    d[0] = static_cast<int>(run_time(m, d[k - 1] + 1).first);
    return d;
}

} // namespace

TEST(Unbalanced, SizesPredicate) {
    EXPECT_TRUE(is_unbalanced_sizes({2, 3}));
    EXPECT_TRUE(is_unbalanced_sizes({1, 2, 5}));
    EXPECT_FALSE(is_unbalanced_sizes({3, 3}));
    EXPECT_FALSE(is_unbalanced_sizes({2, 5, 2}));
}

TEST(Unbalanced, DiagonalCarriesTheProof) {
    for (auto d : std::vector<std::vector<int>>{{2, 3}, {3, 7}, {1, 2, 2}, {2, 4, 3}}) {
        const auto g = build_grid(d);
        const auto o = unbalanced_labeling(g, d);
        int marked = 0;
        for (int v = 0; v < g.size(); ++v) marked += has_kind(o[v], Kind::Unbalanced);
        EXPECT_EQ(marked, d[0] + 1);
        EXPECT_TRUE(unbalanced_ok_everywhere(g, o));
    }
    const auto g = build_grid({3, 3});
    EXPECT_THROW(unbalanced_labeling(g, {3, 3}), Error);
}

TEST(Unbalanced, BrokenChainIsRejected) {
    const std::vector<int> d{3, 5};
    const auto g = build_grid(d);
    for (int x = 0; x <= 3; ++x) {
        auto o = unbalanced_labeling(g, d);
        o[node_at(g, {x, x})] = {OutLabel::exempt_u()};
        EXPECT_FALSE(unbalanced_ok_everywhere(g, o)) << x;
    }
    // A proof on a balanced grid cannot close.
    const auto sq = build_grid({3, 3});
    OutputLabeling o(sq.size(), NodeOutput{OutLabel::exempt_u()});
    for (int x = 0; x <= 3; ++x) o[node_at(sq, {x, x})] = {OutLabel::unbalanced()};
    EXPECT_FALSE(unbalanced_ok_everywhere(sq, o));
}

TEST(Encoding, ExecutionPassesEveryNode) {
    for (auto name : {"unary1", "unary2", "binary"}) {
        const Lba m = halt_through_final(builtin(name));
        for (int B : {2, 3, 5}) {
            const auto d = sizes_for(m, {0, B}, 2);
            const auto g = build_grid(d);
            const auto o = encode_execution(g, m, 2, d);
            EXPECT_TRUE(encoding_ok_everywhere(g, o, m)) << name << " B=" << B;
        }
    }
    const Lba m = halt_through_final(unary_counter(1));
    const auto d = sizes_for(m, {0, 3, 2}, 3);
    const auto g = build_grid(d);
    for (int k : {2, 3}) EXPECT_TRUE(encoding_ok_everywhere(g, encode_execution(g, m, k, d), m)) << k;
}

TEST(Encoding, OneHeadPerRowAndHaltInLastRow) {
    const Lba m = halt_through_final(unary_counter(2));
    const int B = 4;
    const auto d = sizes_for(m, {0, B}, 2);
    const auto g = build_grid(d);
    const auto o = encode_execution(g, m, 2, d);
    std::map<int, int> heads;
    for (int v = 0; v < g.size(); ++v)
        if (has_kind(o[v], Kind::Head)) ++heads[g.coords[v][0]];
    EXPECT_EQ(static_cast<int>(heads.size()), d[0] + 1);
    for (auto [x, c] : heads) EXPECT_EQ(c, 1) << x;
    for (int y = 0; y <= B; ++y) {
        auto cell = enc_cell(o[node_at(g, {d[0], y})], 2, m);
        ASSERT_TRUE(cell);
        EXPECT_EQ(cell->state, m.final_state);
    }
}

TEST(Encoding, TallGridUsesExemptRows) {
    const Lba m = halt_through_final(unary_counter(1));
    auto d = sizes_for(m, {0, 3}, 2);
    const int T = d[0];
    d[0] += 4;
    const auto g = build_grid(d);
    const auto o = encode_execution(g, m, 2, d);
    for (int v = 0; v < g.size(); ++v) {
        const bool exempt = o[v].size() == 1 && o[v][0].kind == Kind::ExemptM;
        EXPECT_EQ(exempt, g.coords[v][0] > T);
    }
    EXPECT_TRUE(encoding_ok_everywhere(g, o, m));
}

TEST(Encoding, SingleCellPerturbationsAreRejected) {
    const Lba m = halt_through_final(unary_counter(1));
    const auto d = sizes_for(m, {0, 4}, 2);
    const auto g = build_grid(d);
    const auto good = encode_execution(g, m, 2, d);
    std::mt19937 rng(5);
    int tried = 0;
    for (int v = 0; v < g.size(); ++v) {
        auto cell = enc_cell(good[v], 2, m);
        if (!cell) continue;
        // Tape symbol change.
        for (int s = 0; s < m.num_symbols(); ++s) {
            if (s == cell->tape) continue;
            auto o = good;
            for (auto& l : o[v])
                if (l.kind == Kind::Tape) l.a = s;
            o[v] = make_output(o[v]);
            EXPECT_FALSE(encoding_ok_everywhere(g, o, m)) << "tape at " << v;
            ++tried;
        }
        // State change.
        auto o = good;
        for (auto& l : o[v])
            if (l.kind == Kind::State) l.a = (l.a + 1 + static_cast<int>(rng() % (m.num_states() - 1))) % m.num_states();
        o[v] = make_output(o[v]);
        EXPECT_FALSE(encoding_ok_everywhere(g, o, m)) << "state at " << v;
        // Head toggle.
        o = good;
        if (cell->head)
            std::erase_if(o[v], [](const OutLabel& l) { return l.kind == Kind::Head; });
        else
            o[v] = make_output([&] { auto x = o[v]; x.push_back(OutLabel::head()); return x; }());
        EXPECT_FALSE(encoding_ok_everywhere(g, o, m)) << "head at " << v;
        tried += 2;
    }
    EXPECT_GT(tried, 100);
}

TEST(Encoding, EncCellShape) {
    const Lba m = unary_counter(1);
    EXPECT_TRUE(enc_cell(make_output({OutLabel::tape(0), OutLabel::state(0), OutLabel::dim(2)}), 2, m));
    EXPECT_FALSE(enc_cell(make_output({OutLabel::tape(0), OutLabel::dim(2)}), 2, m));
    EXPECT_FALSE(enc_cell(make_output({OutLabel::tape(0), OutLabel::state(0), OutLabel::dim(3)}), 2, m));
    EXPECT_FALSE(enc_cell(make_output({OutLabel::tape(0), OutLabel::state(0), OutLabel::dim(2), OutLabel::head(),
                                       OutLabel::head()}),
                          2, m));
}

TEST(Labels, TextRoundTrip) {
    const Lba m = unary_counter(2);
    const auto d = sizes_for(m, {0, 3}, 2);
    auto g = build_grid(d);
    shuffle_ids(g, 9);
    auto o = encode_execution(g, halt_through_final(m), 2, d);
    o[0] = {OutLabel::error()};
    o[1] = {OutLabel::ptr(Prev(2), 1)};
    std::ostringstream out;
    write_labeling(out, g, o, m);
    std::istringstream in(out.str());
    EXPECT_EQ(parse_labeling(in, g, m), o);
}

TEST(Labels, ParseRejectsGarbage) {
    const Lba m = unary_counter(1);
    EXPECT_THROW(parse_out_label("Tape(zz)", m), Error);
    EXPECT_THROW(parse_out_label("Ptr(Up,1,0)", m), Error);
    EXPECT_THROW(parse_out_label("Heads", m), Error);
    EXPECT_THROW(parse_out_label("Dim(x)", m), Error);
}
