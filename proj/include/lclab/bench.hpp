#pragma once

#include "error.hpp"
#include "grid.hpp"
#include "labelings.hpp"
#include "lba.hpp"
#include "pi_problem.hpp"
#include "solver.hpp"
#include "view.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <ostream>
#include <string>
#include <vector>

namespace lclab {

struct ExperimentSpec {
    std::string machine = "unary1"; // builtin name
    int i = 2;
    std::vector<int> B{8, 16, 32, 64};
    int c = 0;
    uint64_t seed = 1; // identifier shuffle
    int jobs = 1;
};

struct Measurement {
    std::string machine;
    int k = 0; // counter count for unary machines, 0 otherwise
    int i = 2, B = 0;
    long n = 0, T = 0;
    int max_radius = 0;
    bool verified = false;
    double wall_ms = 0;
    std::array<long, kBranches> branch_count{};
};

inline int machine_k(const std::string& name) {
    return name.rfind("unary", 0) == 0 ? std::stoi(name.substr(5)) : 0;
}

// Grid with d_1 = T_M(B) and d_j = B for j >= 2.
inline LabeledGraph hard_instance(const PiProblem& p, int B, std::vector<int>* dims = nullptr) {
    TimeOracle T(p.machine);
    std::vector<int> d(p.dims, B);
    d[0] = static_cast<int>(T(B));
    if (dims) *dims = d;
    return build_grid(d);
}

inline Measurement measure(const ExperimentSpec& spec, int B) {
    const auto t0 = std::chrono::steady_clock::now();
    const PiProblem p = make_problem(builtin(spec.machine), spec.i);
    std::vector<int> d;
    LabeledGraph g = hard_instance(p, B, &d);
    shuffle_ids(g, spec.seed + B);
    SolverConfig cfg;
    cfg.c = spec.c;
    const SolveReport rep = solve(p, g, cfg);
    Measurement m;
    m.machine = spec.machine;
    m.k = machine_k(spec.machine);
    m.i = spec.i;
    m.B = B;
    m.n = g.size();
    m.T = d[0];
    m.max_radius = rep.run.max_radius;
    m.branch_count = rep.branch_count;
    m.verified = !rep.run.capped && verify_all(p, g, rep.run.outputs).accepted();
    m.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (!m.verified) throw Error("experiment-failure", "B=" + std::to_string(B) + " not accepted");
    return m;
}

// One row per B, in the order given. Rows are computed by up to `jobs`
// workers and collected in order by the caller's thread.
inline std::vector<Measurement> run_experiment(const ExperimentSpec& spec) {
    if (spec.B.empty()) throw Error("invalid-spec", "no B values");
    for (int B : spec.B)
        if (B < 2) throw Error("invalid-spec", "B must be >= 2");
    std::vector<Measurement> rows;
    const size_t jobs = static_cast<size_t>(std::max(1, spec.jobs));
    for (size_t start = 0; start < spec.B.size(); start += jobs) {
        std::vector<std::future<Measurement>> batch;
        for (size_t k = start; k < std::min(spec.B.size(), start + jobs); ++k)
            batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, measure, spec, spec.B[k]));
        for (auto& f : batch) rows.push_back(f.get());
    }
    return rows;
}

inline void write_csv_header(std::ostream& out) { out << "machine,k,i,B,n,T,max_radius,verified,wall_ms\n"; }

inline void write_csv_row(std::ostream& out, const Measurement& m) {
    out << m.machine << ',' << m.k << ',' << m.i << ',' << m.B << ',' << m.n << ',' << m.T << ',' << m.max_radius
        << ',' << (m.verified ? 1 : 0) << ',' << static_cast<long>(std::lround(m.wall_ms)) << '\n';
}

struct Fit {
    double slope = 0, intercept = 0, r2 = 0;
};

// Least squares on (log x, log y).
inline Fit fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 4) throw Error("fit-unreliable", "need at least 4 rows");
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*lo <= 0 || *hi < 4 * *lo) throw Error("fit-unreliable", "n spans less than 4x");
    const double k = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t j = 0; j < x.size(); ++j) {
        if (y[j] <= 0) throw Error("fit-unreliable", "non-positive value");
        const double a = std::log(x[j]), b = std::log(y[j]);
        sx += a, sy += b, sxx += a * a, sxy += a * b, syy += b * b;
    }
    const double vx = sxx - sx * sx / k, vy = syy - sy * sy / k, cxy = sxy - sx * sy / k;
    if (vx <= 0) throw Error("fit-unreliable", "degenerate spread");
    Fit f;
    f.slope = cxy / vx;
    f.intercept = (sy - f.slope * sx) / k;
    f.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
    return f;
}

inline Fit fit_exponent(const std::vector<Measurement>& rows) {
    std::vector<double> x, y;
    for (auto& m : rows) x.push_back(static_cast<double>(m.n)), y.push_back(m.max_radius);
    return fit_exponent(x, y);
}

// ---------------------------------------------------------------------------
// Lower-bound probe

struct ProbeReport {
    int B = 0, rho = 0;
    long T = 0;
    int x1 = -1, x2 = -1;
    bool views_equal = false, labels_differ = false;
    std::string label1, label2;
    bool success() const { return views_equal && labels_differ; }
};

// Two nodes (x1, 0, ..., 0), (x2, 0, ..., 0) far from both dimension-1 ends,
// with identical radius-rho views but different forced encoding labels.
inline ProbeReport lower_bound_probe(const Lba& machine, int i, int B, int rho = -1) {
    const PiProblem p = make_problem(machine, i);
    std::vector<int> d;
    const LabeledGraph g = hard_instance(p, B, &d);
    ProbeReport rep;
    rep.B = B;
    rep.T = d[0];
    rep.rho = rho >= 0 ? rho : static_cast<int>(rep.T / 3);
    const OutputLabeling forced = encode_execution(g, p.machine, 2, d);
    auto node_at = [&](int x) {
        std::vector<int> c(i, 0);
        c[0] = x;
        for (int v = 0; v < g.size(); ++v)
            if (g.coords[v] == c) return v;
        throw Error("internal-invariant-violation", "missing grid node");
    };
    const int lo = std::max(rep.rho + 1, static_cast<int>(rep.T / 3));
    const int hi = std::min(static_cast<int>(rep.T) - rep.rho - 1, static_cast<int>(2 * rep.T / 3));
    if (lo > hi) throw Error("probe-inconclusive", "no interior probe positions for rho=" + std::to_string(rep.rho));
    const int v1 = node_at(lo);
    const std::string w1 = canonical_view(gather_view(g, v1, rep.rho));
    for (int x = lo + 1; x <= hi; ++x) {
        const int v2 = node_at(x);
        if (forced[v2] == forced[v1]) continue;
        rep.x1 = lo;
        rep.x2 = x;
        rep.label1 = to_string(forced[v1], p.machine);
        rep.label2 = to_string(forced[v2], p.machine);
        rep.labels_differ = true;
        rep.views_equal = canonical_view(gather_view(g, v2, rep.rho)) == w1;
        return rep;
    }
    throw Error("probe-inconclusive", "forced labels agree on the probe range");
}

} // namespace lclab
