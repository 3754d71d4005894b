#pragma once

#include <cstdint>
#include <string>

#include "cbicl/side_operator.h"
#include "cbicl/solver_result.h"

namespace cbicl {

/// Low-rank factors of the lifted variable, entries boxed to [0, 1].
struct FactorPair {
    arma::mat z_u; // n_bar x r
    arma::mat z_v; // m_bar x r
    int r = 0;
};

struct AlmState {
    arma::vec lambda_u, lambda_v;
    double beta = 10.0;
    arma::vec residual_u, residual_v;
    int iteration = 0;
};

// smallest r with r(r+1)/2 > c, clamped to [k, min(n_bar, m_bar)]
int choose_rank(int constraint_count, int k, int n_bar, int m_bar);

double eval_aug_lagrangian(const FactorPair& f, const AlmState& s, const SideOperator& op_u,
                           const SideOperator& op_v, const arma::mat& a_bar);

// gradients with respect to the two factor blocks
std::pair<arma::mat, arma::mat> grad_aug_lagrangian(const FactorPair& f, const AlmState& s,
                                                    const SideOperator& op_u,
                                                    const SideOperator& op_v,
                                                    const arma::mat& a_bar);

// Adaptive Barzilai-Borwein steplength: 1 at the first inner iteration, then
// BB1 unless BB2/BB1 < tau_alpha, in which case the minimum of the last
// M_alpha BB2 values; clamped to [1e-10, 1e10].
// `history` holds (step difference, gradient difference) pairs, most recent last.
double bb_steplength(const std::vector<std::pair<arma::vec, arma::vec>>& history, int k,
                     int m_alpha = 2, double tau_alpha = 0.1);

struct SubproblemParams {
    double theta = 0.5;   // backtracking factor
    double sigma = 1e-4;  // Armijo slope fraction
    int max_outer = 1000;
    int max_inner = 2000;
    int m_alpha = 2;
    double tau_alpha = 0.1;
};

struct SubproblemStats {
    int outer_iters = 0;
    long inner_iters = 0;
    bool converged = false;
};

// Two-block Gauss-Seidel projected gradient descent on the augmented
// Lagrangian for fixed multipliers and penalty.
FactorPair solve_subproblem(FactorPair f0, const AlmState& s, const SideOperator& op_u,
                            const SideOperator& op_v, const arma::mat& a_bar, double eps,
                            const SubproblemParams& params, SubproblemStats* stats = nullptr);

struct AlmParams {
    double beta1 = 10.0;
    double gamma = 2.0;
    double tau = 0.5;
    double eps_alm = 1e-3;
    int max_outer = 200;
    double beta_cap = 1e8; // penalty growth beyond this is numerically meaningless
    int stall_window = 20; // non-improving iterations at the cap before giving up
    SubproblemParams sub;
};

struct AlmResult {
    FactorPair factors;
    AlmState state;
    bool converged = false;
    int outer_iters = 0;
    double final_residual = 0.0;
    std::string run_log;
};

// Augmented Lagrangian loop: inexact subproblem solve, multiplier step,
// residual-driven penalty growth, stop on the combined residual/stationarity
// criterion evaluated with the updated multipliers.
AlmResult alm_solve(const AggregatedInstance& agg, int k, std::uint64_t seed,
                    const AlmParams& params);

// lifted matrix [Z_U; Z_V][Z_U; Z_V]^T handed to the rounding procedure
arma::mat lift_factors(const FactorPair& f);

struct HeuristicParams {
    int restarts = 5;
    std::uint64_t seed = 0;
    double eps_alm = 1e-3;
    int threads = 1;
    AlmParams alm;
};

// multistart wrapper: independent seeds per restart, best rounded objective wins
SolverResult heuristic_solve(const WeightMatrix& A, const PairwiseConstraints& con, int k,
                             const HeuristicParams& params);

} // namespace cbicl
