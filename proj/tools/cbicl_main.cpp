#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "cbicl/branch_and_cut.h"
#include "cbicl/evalgen.h"
#include "cbicl/instance_io.h"
#include "cbicl/lowrank.h"
#include "cbicl/rng.h"

using namespace cbicl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitTimeLimit = 3;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) return;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

std::string kv(const std::string& key, const std::string& value) { return key + "=" + value; }

int run_generate(int n, int m, int k, int ml_u, int cl_u, int ml_v, int cl_v, double noise,
                 double violation_frac, std::uint64_t seed, const std::string& out_path,
                 const std::string& truth_path) {
    PlantedInstance planted = generate_planted(n, m, k, noise, seed);
    ConstraintQuotas quotas{ml_u, cl_u, ml_v, cl_v};
    PairwiseConstraints con = sample_constraints(planted.row_truth, planted.col_truth, quotas,
                                                 violation_frac, derive_seed(seed, 7));
    Instance inst;
    inst.A = planted.A;
    inst.con = con;
    inst.k = k;
    save_instance(inst, out_path);
    if (!truth_path.empty()) {
        TruthFile truth;
        truth.row_labels = planted.row_truth;
        truth.col_labels = planted.col_truth;
        save_truth(truth, truth_path);
    }
    std::cout << "instance=" << out_path << "\n";
    return kExitOk;
}

int run_solve(const std::string& instance_path, const std::string& engine, double gap_tol,
              double sdp_tol, double eps_alm, int restarts, double time_limit,
              std::uint64_t seed, int max_separate, int max_add, double cp_stop_rel,
              int threads, const std::string& out_path, const std::string& report_path,
              const std::string& log_path) {
    Instance inst = load_instance(instance_path);

    SolverResult result;
    if (engine == "exact") {
        ExactParams params;
        params.gap_tol = gap_tol;
        params.sdp_tol = sdp_tol;
        params.cp_stop_rel = cp_stop_rel;
        params.max_separate = max_separate;
        params.max_add = max_add;
        params.time_limit_s = time_limit;
        params.seed = seed;
        result = solve_exact(inst.A, inst.con, inst.k, params);
    } else if (engine == "lowrank") {
        HeuristicParams params;
        params.restarts = restarts;
        params.seed = seed;
        params.eps_alm = eps_alm;
        params.threads = threads;
        result = heuristic_solve(inst.A, inst.con, inst.k, params);
    } else {
        std::cerr << "unknown engine '" << engine << "' (use exact or lowrank)\n";
        return kExitError;
    }

    write_text(log_path, result.event_log);

    if (result.status == SolveStatus::Infeasible) {
        std::cout << "status=infeasible\n";
        if (result.infeasible) std::cout << "reason=" << result.infeasible->reason << "\n";
        std::string report = kv("engine", engine) + "\n" + kv("status", "infeasible") + "\n";
        write_text(report_path, report);
        return kExitInfeasible;
    }

    if (!result.best) {
        std::cout << "status=time_limit\n";
        write_text(report_path, kv("engine", engine) + "\n" + kv("status", "time_limit") + "\n");
        return kExitTimeLimit;
    }
    SolutionFile sol;
    sol.objective = result.lb;
    sol.row_labels = result.best->row_labels;
    sol.col_labels = result.best->col_labels;
    if (!out_path.empty()) save_solution(sol, out_path);

    // wall time goes to stdout only; report files must be reproducible run to run
    std::ostringstream report;
    report << kv("engine", engine) << "\n";
    report << kv("status",
                 result.status == SolveStatus::TimeLimit ? "time_limit" : "solved")
           << "\n";
    report << kv("objective", format_double(result.lb)) << "\n";
    if (engine == "exact") {
        report << kv("ub", format_double(result.ub)) << "\n";
        report << kv("gap", format_double(result.gap)) << "\n";
        report << kv("nodes", std::to_string(result.nodes)) << "\n";
        report << kv("root_gap", format_double(result.root_gap)) << "\n";
        report << kv("cp_rounds", std::to_string(result.root_cut_rounds)) << "\n";
    } else {
        report << kv("restarts", std::to_string(restarts)) << "\n";
    }
    report << kv("seed", std::to_string(seed)) << "\n";
    write_text(report_path, report.str());

    std::cout << report.str();
    std::cout << kv("time_s", format_double(result.wall_time_s)) << "\n";

    return result.status == SolveStatus::TimeLimit ? kExitTimeLimit : kExitOk;
}

int run_eval(const std::string& instance_path, const std::string& solution_path,
             const std::string& truth_path) {
    Instance inst = load_instance(instance_path);
    SolutionFile sol = load_solution(solution_path);
    TruthFile truth = load_truth(truth_path);

    if (sol.row_labels.size() != truth.row_labels.size() ||
        sol.col_labels.size() != truth.col_labels.size() ||
        static_cast<int>(sol.row_labels.size()) != inst.A.n() ||
        static_cast<int>(sol.col_labels.size()) != inst.A.m()) {
        std::cerr << "label sequences have mismatched lengths\n";
        return kExitError;
    }

    bool feasible = true;
    try {
        Biclustering bic(inst.k, sol.row_labels, sol.col_labels);
        bic.validate();
        feasible = check_feasible(bic, inst.con);
    } catch (const std::exception&) {
        feasible = false;
    }

    std::cout << kv("ari_rows", format_double(ari(sol.row_labels, truth.row_labels))) << "\n";
    std::cout << kv("nmi_rows", format_double(nmi(sol.row_labels, truth.row_labels))) << "\n";
    std::cout << kv("ari_cols", format_double(ari(sol.col_labels, truth.col_labels))) << "\n";
    std::cout << kv("nmi_cols", format_double(nmi(sol.col_labels, truth.col_labels))) << "\n";
    std::cout << kv("feasible", feasible ? "true" : "false") << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained biclustering toolkit"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a planted CBICL instance");
    int n = 0, m = 0, k = 0, ml_u = 0, cl_u = 0, ml_v = 0, cl_v = 0;
    double noise = 0.25, violation_frac = 0.0;
    std::uint64_t seed = 0;
    std::string out_path = "instance.cbicl", truth_path;
    gen->add_option("--n", n, "row vertices")->required();
    gen->add_option("--m", m, "column vertices")->required();
    gen->add_option("--k", k, "number of bicliques")->required();
    gen->add_option("--ml-u", ml_u, "must-link quota on U");
    gen->add_option("--cl-u", cl_u, "cannot-link quota on U");
    gen->add_option("--ml-v", ml_v, "must-link quota on V");
    gen->add_option("--cl-v", cl_v, "cannot-link quota on V");
    gen->add_option("--noise", noise, "Gaussian noise standard deviation");
    gen->add_option("--violation-frac", violation_frac, "fraction of constraints flipped");
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--out", out_path, "instance output path");
    gen->add_option("--truth-out", truth_path, "ground-truth sidecar path");

    // solve
    auto* solve = app.add_subcommand("solve", "solve a CBICL instance");
    std::string instance_path, engine = "exact", solution_path = "solution.txt";
    std::string report_path, log_path;
    double gap_tol = 1e-3, sdp_tol = 1e-4, eps_alm = 1e-3, time_limit = 0.0,
           cp_stop_rel = 1e-3;
    int restarts = 5, max_separate = 100000, max_add = 10000, threads = 1;
    std::uint64_t solve_seed = 0;
    solve->add_option("--instance", instance_path, "CBICL instance path")->required();
    solve->add_option("--engine", engine, "exact|lowrank");
    solve->add_option("--gap-tol", gap_tol, "optimality gap tolerance");
    solve->add_option("--sdp-tol", sdp_tol, "relative KKT tolerance of the bounding solver");
    solve->add_option("--eps-alm", eps_alm, "ALM stopping tolerance");
    solve->add_option("--restarts", restarts, "heuristic restarts")
        ->check(CLI::PositiveNumber);
    solve->add_option("--time-limit", time_limit, "time limit in seconds (0 = unlimited)");
    solve->add_option("--seed", solve_seed, "random seed");
    solve->add_option("--max-separate", max_separate, "cut candidates sampled per side");
    solve->add_option("--max-add", max_add, "cuts added per round");
    solve->add_option("--cp-stop-rel", cp_stop_rel, "cutting-plane stop threshold");
    solve->add_option("--threads", threads, "worker threads (1 = deterministic)");
    solve->add_option("--out", solution_path, "SOLUTION output path");
    solve->add_option("--report", report_path, "key=value report path");
    solve->add_option("--log", log_path, "event/run log path");

    // eval
    auto* eval = app.add_subcommand("eval", "score a solution against ground truth");
    std::string eval_instance, eval_solution, eval_truth;
    eval->add_option("--instance", eval_instance, "CBICL instance path")->required();
    eval->add_option("--solution", eval_solution, "SOLUTION path")->required();
    eval->add_option("--truth", eval_truth, "TRUTH sidecar path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return run_generate(n, m, k, ml_u, cl_u, ml_v, cl_v, noise, violation_frac, seed,
                                out_path, truth_path);
        if (solve->parsed())
            return run_solve(instance_path, engine, gap_tol, sdp_tol, eps_alm, restarts,
                             time_limit, solve_seed, max_separate, max_add, cp_stop_rel,
                             threads, solution_path, report_path, log_path);
        if (eval->parsed()) return run_eval(eval_instance, eval_solution, eval_truth);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
