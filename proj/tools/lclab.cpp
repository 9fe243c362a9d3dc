// Command-line front end: instance generation, machine runs, solving,
// verification, experiments, lower-bound probes and the tree speedup.

#include "lclab/lclab.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace lclab;
using json = nlohmann::json;

namespace {

Lba machine_from(const std::string& spec) {
    if (spec.rfind("unary", 0) == 0 || spec == "binary") return builtin(spec);
    return load_machine(spec);
}

// Writes to `path`, or stdout when it is empty or "-".
template <class F>
void emit(const std::string& path, F&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("io-error", "cannot write " + path);
    write(out);
}

std::string to_string_i128(__int128 v) {
    if (v == 0) return "0";
    std::string s;
    const bool neg = v < 0;
    if (neg) v = -v;
    while (v > 0) s += static_cast<char>('0' + static_cast<int>(v % 10)), v /= 10;
    if (neg) s += '-';
    return {s.rbegin(), s.rend()};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LOCAL-model laboratory for LBA-derived LCLs on grids and the tree speedup"};
    app.require_subcommand(1);
    uint64_t seed = 1;
    app.add_option("--seed", seed, "random seed")->capture_default_str();

    // gen-grid
    auto* gen_grid = app.add_subcommand("gen-grid", "balanced or unbalanced grid graph");
    std::vector<int> dims;
    std::string out_path, mutation;
    bool shuffle = false;
    gen_grid->add_option("--dims", dims, "d_1,...,d_i")->required()->delimiter(',');
    gen_grid->add_option("--out", out_path, "output file (default stdout)");
    gen_grid->add_option("--corrupt", mutation, "flip-label|delete-edge|add-chord|duplicate-label");
    gen_grid->add_flag("--shuffle-ids", shuffle, "random identifiers");
    gen_grid->add_option("--seed", seed);

    // gen-torus
    auto* gen_torus = app.add_subcommand("gen-torus", "torus, or cylinder with --wrap");
    std::vector<int> wrap;
    gen_torus->add_option("--dims", dims, "sizes")->required()->delimiter(',');
    gen_torus->add_option("--wrap", wrap, "wrapped dimensions (default all)")->delimiter(',');
    gen_torus->add_option("--out", out_path);
    gen_torus->add_flag("--shuffle-ids", shuffle);
    gen_torus->add_option("--seed", seed);

    // run-lba
    auto* run_lba = app.add_subcommand("run-lba", "simulate a machine on an empty tape");
    std::string machine = "unary1";
    int B = 8;
    long max_steps = kDefaultMaxSteps;
    bool trace = false;
    run_lba->add_option("--machine", machine, "builtin name or machine file")->capture_default_str();
    run_lba->add_option("--B", B, "tape size")->capture_default_str();
    run_lba->add_option("--max-steps", max_steps)->capture_default_str();
    run_lba->add_flag("--trace", trace, "print every configuration");
    run_lba->add_option("--seed", seed);

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "run the distributed algorithm on a grid file");
    std::string graph_path, labeling_path;
    int c = 0;
    solve_cmd->add_option("--machine", machine)->capture_default_str();
    solve_cmd->add_option("--graph", graph_path)->required();
    solve_cmd->add_option("--out", out_path, "labeling output");
    solve_cmd->add_option("--c", c, "radius constant (0: max(i,3))");
    solve_cmd->add_option("--seed", seed);

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "check a labeling against the LCL");
    verify_cmd->add_option("--machine", machine)->capture_default_str();
    verify_cmd->add_option("--graph", graph_path)->required();
    verify_cmd->add_option("--labeling", labeling_path)->required();
    verify_cmd->add_option("--seed", seed);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "worst-case instances over a B range, CSV output");
    std::vector<int> Bs{8, 16, 32, 64};
    int i = 2, jobs = 1;
    bool fit = false;
    bench_cmd->add_option("--machine", machine)->capture_default_str();
    bench_cmd->add_option("--i", i)->capture_default_str();
    bench_cmd->add_option("--B", Bs)->delimiter(',');
    bench_cmd->add_option("--c", c);
    bench_cmd->add_option("--jobs", jobs)->capture_default_str();
    bench_cmd->add_option("--csv", out_path, "CSV output (default stdout)");
    bench_cmd->add_flag("--fit", fit, "print the log-log slope on stderr");
    bench_cmd->add_option("--seed", seed);

    // probe
    auto* probe_cmd = app.add_subcommand("probe", "lower-bound witness on the worst-case instance");
    int rho = -1;
    probe_cmd->add_option("--machine", machine)->capture_default_str();
    probe_cmd->add_option("--i", i)->capture_default_str();
    probe_cmd->add_option("--B", B)->capture_default_str();
    probe_cmd->add_option("--rho", rho, "view radius (default floor(T/3))");
    probe_cmd->add_option("--seed", seed);

    // speedup
    auto* speedup_cmd = app.add_subcommand("speedup", "pump-and-fill speedup on a tree");
    std::string tree_path, lcl = "leafnear", base = "gather";
    int random_n = 0;
    double c_tau = 1.0;
    speedup_cmd->add_option("--tree", tree_path, "tree in graph format");
    speedup_cmd->add_option("--random", random_n, "generate a random tree with n nodes instead");
    speedup_cmd->add_option("--lcl", lcl, "trivial|leafnear|2col|3col")->capture_default_str();
    speedup_cmd->add_option("--base", base)->capture_default_str();
    speedup_cmd->add_option("--c-tau", c_tau, "skeleton constant")->capture_default_str();
    speedup_cmd->add_option("--out", out_path, "labels output");
    speedup_cmd->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_grid) {
            LabeledGraph g = build_grid(dims);
            if (!mutation.empty()) g = corrupt(g, parse_mutation(mutation), seed);
            if (shuffle) shuffle_ids(g, seed);
            emit(out_path, [&](std::ostream& o) { write_graph(o, g); });
        } else if (*gen_torus) {
            LabeledGraph g = wrap.empty() ? build_torus(dims) : build_cylinder(dims, wrap);
            if (shuffle) shuffle_ids(g, seed);
            emit(out_path, [&](std::ostream& o) { write_graph(o, g); });
        } else if (*run_lba) {
            const Lba m = machine_from(machine);
            validate(m);
            const RunResult r = run(m, B, max_steps);
            if (trace)
                for (auto& cfg : r.trace) {
                    std::cout << cfg.step << ' ' << m.states[cfg.state] << ' ' << cfg.head << ' ';
                    for (int s : cfg.tape) std::cout << m.symbols[s] << ' ';
                    std::cout << '\n';
                }
            std::cout << "T=" << r.T << " halted=" << (r.halted ? 1 : 0) << '\n';
        } else if (*solve_cmd) {
            const LabeledGraph g = load_graph(graph_path);
            const PiProblem p = make_problem(machine_from(machine), g.dims);
            SolverConfig cfg;
            cfg.c = c;
            const SolveReport rep = solve(p, g, cfg);
            emit(out_path, [&](std::ostream& o) { write_labeling(o, g, rep.run.outputs, p.machine); });
            const auto v = verify_all(p, g, rep.run.outputs);
            std::cerr << "B=" << rep.B << " T=" << rep.T << " R=" << rep.R << " max_radius=" << rep.run.max_radius
                      << " accepted=" << v.accepted() << '\n';
            return v.accepted() ? 0 : 1;
        } else if (*verify_cmd) {
            const LabeledGraph g = load_graph(graph_path);
            const PiProblem p = make_problem(machine_from(machine), g.dims);
            const OutputLabeling o = load_labeling(labeling_path, g, p.machine);
            const auto v = verify_all(p, g, o);
            for (size_t k = 0; k < v.rejecting.size(); ++k)
                std::cout << "reject " << g.ids[v.rejecting[k]] << " condition " << v.condition[k] << '\n';
            std::cout << (v.accepted() ? "accepted" : "rejected") << '\n';
            return v.accepted() ? 0 : 1;
        } else if (*bench_cmd) {
            ExperimentSpec spec;
            spec.machine = machine;
            spec.i = i;
            spec.B = Bs;
            spec.c = c;
            spec.seed = seed;
            spec.jobs = jobs;
            const auto rows = run_experiment(spec);
            emit(out_path, [&](std::ostream& o) {
                write_csv_header(o);
                for (auto& m : rows) write_csv_row(o, m);
            });
            if (fit) {
                const Fit f = fit_exponent(rows);
                std::cerr << "slope=" << f.slope << " r2=" << f.r2 << '\n';
            }
        } else if (*probe_cmd) {
            const ProbeReport r = lower_bound_probe(machine_from(machine), i, B, rho);
            std::cout << "B=" << r.B << " T=" << r.T << " rho=" << r.rho << " x1=" << r.x1 << " x2=" << r.x2
                      << " views_equal=" << r.views_equal << " labels_differ=" << r.labels_differ << '\n'
                      << "  " << r.label1 << "\n  " << r.label2 << '\n';
            return r.success() ? 0 : 1;
        } else if (*speedup_cmd) {
            LabeledGraph g;
            if (!tree_path.empty()) g = load_graph(tree_path);
            else if (random_n > 0) g = random_tree(random_n, seed);
            else throw Error("invalid-config", "need --tree or --random");
            SpeedupConfig cfg;
            cfg.base = base;
            cfg.c_tau = c_tau;
            const TreeLcl p = tree_lcl(lcl);
            const SpeedupReport r = speedup_run(g, p, cfg);
            json j = {{"n", r.n},
                      {"accepted", r.accepted},
                      {"brute_force", r.brute_force},
                      {"tau", r.tau},
                      {"ell_pump", r.ell_pump},
                      {"c", r.c},
                      {"B", r.B},
                      {"tau_orig", r.tau_orig},
                      {"pumped_paths", r.qs.size()},
                      {"max_radius", r.max_radius},
                      {"K", r.K},
                      {"size_S", to_string_i128(r.bounds.size_S)},
                      {"N", to_string_i128(r.bounds.N)},
                      {"size_bound", r.bounds.size_bound},
                      {"branch_count", r.bounds.branch_count},
                      {"branch_max_count", r.bounds.branch_max_count},
                      {"amplification", r.bounds.amplification},
                      {"far_pairs", r.bounds.far_pairs},
                      {"pump_oracle", r.bounds.pump_oracle},
                      {"oracle_checks", r.bounds.oracle_checks}};
            std::cerr << j.dump(2) << '\n';
            emit(out_path, [&](std::ostream& o) {
                for (int v = 0; v < r.n; ++v) o << g.ids[v] << ' ' << r.labels[v] << '\n';
            });
            return r.accepted ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
