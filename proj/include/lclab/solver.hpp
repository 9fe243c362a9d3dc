#pragma once

#include "error.hpp"
#include "grid.hpp"
#include "labels.hpp"
#include "lba.hpp"
#include "pi_problem.hpp"
#include "view.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <map>
#include <memory>
#include <vector>

namespace lclab {

struct SolverConfig {
    int c = 0;          // 0 picks max(i, 3)
    long claimed_n = 0; // 0 picks |V|
    long max_steps = kDefaultMaxSteps;
};

enum class Branch : uint8_t { Error, ErrorPointer, WrapPointer, Encoding, ExemptM, Unbalanced, ExemptU };
inline constexpr int kBranches = 7;

struct SolveReport {
    RunReport run;
    std::vector<Branch> branch;
    std::array<long, kBranches> branch_count{};
    int B = 0;
    long T = 0;
    long R = 0;
    int c = 0;
};

// Algorithm A. Each node decides once its ball has radius R + 3 or covers the
// whole graph; the three extra rounds let it evaluate the grid constraints at
// every node up to distance R.
class Solver {
public:
    Solver(const PiProblem& p, const LabeledGraph& g, SolverConfig cfg)
        : p_(&p), g_(&g), oracle_(p.machine, cfg.max_steps) {
        const int i = p.dims;
        c_ = cfg.c ? cfg.c : std::max(i, 3);
        if (c_ < i) throw Error("invalid-config", "c must be >= i");
        const long n = cfg.claimed_n ? cfg.claimed_n : g.size();
        B_ = compute_tape_size(n, i, oracle_);
        T_ = oracle_(B_);
        R_ = c_ * T_;
        grid_state_.assign(g.size(), -1);
        coord_.assign(static_cast<size_t>(g.size()) * i, 0);
        stamp_.assign(g.size(), 0);
        err_dist_.assign(g.size(), -1);
        branch_.assign(g.size(), Branch::Error);
    }

    std::optional<NodeOutput> operator()(Ball& ball, long) {
        const bool complete = ball.complete();
        const int t = ball.t();
        const int v = ball.center();
        if (t < 3 && !complete) return std::nullopt;
        if (!grid_ok(v)) return decide(v, Branch::Error, {OutLabel::error()});
        if (!complete && t < R_ + 3) return std::nullopt;
        return decide_full(ball, complete);
    }

    SolveReport solve() {
        SolveReport rep;
        rep.run = run_algorithm(*g_, std::ref(*this), 0);
        rep.branch = branch_;
        for (auto b : branch_) ++rep.branch_count[static_cast<int>(b)];
        rep.B = B_;
        rep.T = T_;
        rep.R = R_;
        rep.c = c_;
        return rep;
    }

    int B() const { return B_; }
    long T() const { return T_; }
    long R() const { return R_; }

private:
    NodeOutput decide(int v, Branch b, std::vector<OutLabel> ls) {
        branch_[v] = b;
        return make_output(std::move(ls));
    }

    bool grid_ok(int u) {
        if (grid_state_[u] < 0) grid_state_[u] = check_grid_at(*g_, u);
        return grid_state_[u];
    }

    NodeOutput decide_full(Ball& ball, bool complete) {
        const LabeledGraph& g = *g_;
        const int i = p_->dims, v = ball.center(), t = ball.t();
        const auto& nodes = ball.nodes();
        // Grid validity is known for every node whose 2-ball is visible.
        size_t known = nodes.size();
        if (!complete)
            while (known > 0 && ball.dist(nodes[known - 1]) > t - 3) --known;

        std::vector<int> errors;
        for (size_t q = 0; q < known; ++q)
            if (!grid_ok(nodes[q])) errors.push_back(nodes[q]);
        if (!errors.empty()) return error_pointer(ball, errors);

        // Relative coordinates over the known region.
        ++epoch_;
        auto known_node = [&](int u) { return stamp_[u] == epoch_; };
        for (size_t q = 0; q < known; ++q) stamp_[nodes[q]] = epoch_;
        int* cv = &coord_[static_cast<size_t>(v) * i];
        std::fill(cv, cv + i, 0);
        std::vector<int> queue{v};
        ++place_epoch_;
        if (place_stamp_.size() != static_cast<size_t>(g.size())) place_stamp_.assign(g.size(), 0);
        place_stamp_[v] = place_epoch_;
        unsigned wrapped = 0;
        for (size_t q = 0; q < queue.size(); ++q) {
            const int a = queue[q];
            const int* ca = &coord_[static_cast<size_t>(a) * i];
            for (auto& h : g.adj[a]) {
                if (!known_node(h.to)) continue;
                int* cb = &coord_[static_cast<size_t>(h.to) * i];
                const int j = h.mine.dim - 1;
                const int step = h.mine.dir == Dir::Next ? 1 : -1;
                if (place_stamp_[h.to] != place_epoch_) {
                    place_stamp_[h.to] = place_epoch_;
                    std::copy(ca, ca + i, cb);
                    cb[j] += step;
                    queue.push_back(h.to);
                } else {
                    for (int d = 0; d < i; ++d)
                        if (cb[d] != ca[d] + (d == j ? step : 0)) wrapped |= 1u << d;
                }
            }
        }
        if (wrapped) {
            int k = 0;
            while (!(wrapped >> k & 1)) ++k;
            return decide(v, Branch::WrapPointer, {OutLabel::ptr(Next(k + 1), 0)});
        }

        std::vector<int> min_prev(i + 1, INT_MAX), max_next(i + 1, INT_MIN);
        for (int u : queue) {
            const int* cu = &coord_[static_cast<size_t>(u) * i];
            for (int j = 1; j <= i; ++j) {
                if (!has_label(g, u, Prev(j))) min_prev[j] = std::min(min_prev[j], cu[j - 1]);
                if (!has_label(g, u, Next(j))) max_next[j] = std::max(max_next[j], cu[j - 1]);
            }
        }
        std::vector<long> d(i + 1, -1);
        for (int j = 1; j <= i; ++j)
            if (min_prev[j] != INT_MAX && max_next[j] != INT_MIN && max_next[j] - min_prev[j] >= 1)
                d[j] = max_next[j] - min_prev[j];

        int k = 0;
        for (int j = 2; j <= i; ++j) {
            if (d[j] < 0 || d[j] > T_ || (d[1] >= 0 && d[j] > d[1])) continue;
            if (k == 0 || d[j] < d[k]) k = j;
        }
        if (k) return encoding_output(v, k, d, min_prev);

        bool diag = true;
        long first = -1;
        for (int j = 1; j <= i && diag; ++j) {
            if (min_prev[j] == INT_MAX) {
                diag = false;
                break;
            }
            long cj = cv[j - 1] - min_prev[j];
            if (first < 0) first = cj;
            diag = cj == first;
        }
        if (diag) return decide(v, Branch::Unbalanced, {OutLabel::unbalanced()});
        return decide(v, Branch::ExemptU, {OutLabel::exempt_u()});
    }

    NodeOutput encoding_output(int v, int k, const std::vector<long>& d, const std::vector<int>& min_prev) {
        const LabeledGraph& g = *g_;
        const int i = p_->dims;
        for (int j = 2; j <= i; ++j)
            if (j != k && has_label(g, v, Prev(j))) return decide(v, Branch::ExemptM, {OutLabel::exempt_m()});
        const int* cv = &coord_[static_cast<size_t>(v) * i];
        const int tape = static_cast<int>(d[k]) + 1;
        const long y = cv[k - 1] - min_prev[k];
        const long Tk = oracle_(tape);
        long limit = Tk;
        if (d[1] >= 0) limit = std::min(limit, d[1]);
        if (min_prev[1] == INT_MAX) return decide(v, Branch::ExemptM, {OutLabel::exempt_m()});
        const long x = cv[0] - min_prev[1];
        if (x > limit || y < 0 || y >= tape) return decide(v, Branch::ExemptM, {OutLabel::exempt_m()});
        const RunResult& tr = trace(tape, Tk);
        const MachineConfig& cfg = tr.trace.at(x);
        std::vector<OutLabel> ls{OutLabel::tape(cfg.tape[y]), OutLabel::state(cfg.state), OutLabel::dim(k)};
        if (cfg.head == y) ls.push_back(OutLabel::head());
        return decide(v, Branch::Encoding, ls);
    }

    NodeOutput error_pointer(Ball& ball, const std::vector<int>& errors) {
        const LabeledGraph& g = *g_;
        const int v = ball.center();
        ++err_epoch_;
        if (err_stamp_.size() != static_cast<size_t>(g.size())) err_stamp_.assign(g.size(), 0);
        std::vector<int> queue = errors;
        for (int e : errors) err_stamp_[e] = err_epoch_, err_dist_[e] = 0;
        for (size_t q = 0; q < queue.size(); ++q) {
            const int a = queue[q];
            for (auto& h : g.adj[a])
                if (ball.edge_visible(a, h.to) && err_stamp_[h.to] != err_epoch_) {
                    err_stamp_[h.to] = err_epoch_;
                    err_dist_[h.to] = err_dist_[a] + 1;
                    queue.push_back(h.to);
                }
        }
        const int D = err_dist_[v];
        std::optional<EdgeLabel> best;
        for (auto& h : g.adj[v])
            if (ball.edge_visible(v, h.to) && err_stamp_[h.to] == err_epoch_ && err_dist_[h.to] == D - 1)
                if (!best || h.mine < *best) best = h.mine;
        if (!best) throw Error("internal-invariant-violation", "no neighbour closer to an error");
        return decide(v, Branch::ErrorPointer, {OutLabel::ptr(*best, 1)});
    }

    const RunResult& trace(int tape, long steps) {
        auto it = traces_.find(tape);
        if (it == traces_.end()) it = traces_.emplace(tape, run(p_->machine, tape, steps)).first;
        return it->second;
    }

    const PiProblem* p_;
    const LabeledGraph* g_;
    TimeOracle oracle_;
    int c_ = 3, B_ = 2;
    long T_ = 0, R_ = 0;
    std::vector<int8_t> grid_state_;
    std::vector<int> coord_;
    std::vector<uint32_t> stamp_, place_stamp_, err_stamp_;
    uint32_t epoch_ = 0, place_epoch_ = 0, err_epoch_ = 0;
    std::vector<int> err_dist_;
    std::vector<Branch> branch_;
    std::map<int, RunResult> traces_;
};

inline SolveReport solve(const PiProblem& p, const LabeledGraph& g, SolverConfig cfg = {}) {
    Solver s(p, g, cfg);
    return s.solve();
}

} // namespace lclab
