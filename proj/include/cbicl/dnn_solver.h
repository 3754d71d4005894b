#pragma once

#include <armadillo>
#include <cstdint>
#include <vector>

#include "cbicl/aggregate.h"
#include "cbicl/cuts.h"
#include "cbicl/side_operator.h"

namespace cbicl {

/// Dual multipliers of the relaxation, the raw material of the safe bound.
struct DualEstimate {
    arma::vec y_u, y_v;       // row-sum multipliers
    double alpha_u = 0.0, alpha_v = 0.0; // trace multipliers
    arma::vec tau_u, tau_v;   // cannot-link multipliers
    arma::vec t_u, t_v;       // cut multipliers, >= 0, pool order per side
    arma::mat Q;              // multiplier of Z >= 0, entrywise >= 0
};

/// DNN relaxation of an aggregated instance together with an active cut pool.
struct DnnRelaxation {
    AggregatedInstance agg;
    CutPool cuts;

    SideOperator op_u, op_v;
    arma::mat W;    // block data matrix; <W, Z> equals the relaxation objective
    arma::vec b;    // stacked equality right-hand side
    int N = 0;      // n_bar + m_bar
    double d_min = 0.0; // 1/min(e_u) + 1/min(e_v)

    static DnnRelaxation build(const AggregatedInstance& agg, CutPool cuts = CutPool{});

    int n_bar() const { return agg.n_bar(); }
    int m_bar() const { return agg.m_bar(); }

    arma::vec apply_equalities(const arma::mat& Z) const;
    arma::mat adjoint_equalities(const arma::vec& lambda) const;
    arma::mat adjoint_cuts(const arma::vec& t) const;
    arma::vec cut_values(const arma::mat& Z) const;
    arma::mat equality_gram() const; // block-diagonal A A^T
};

struct DnnParams {
    double tol = 1e-4;   // relative KKT residual
    int max_iter = 5000;
    double sigma0 = 1.0;
    int t_passes = 2;    // coordinate-descent sweeps over cut multipliers per iteration
};

/// Warm start carried across cutting-plane rounds of the same node.
struct DnnWarmStart {
    bool valid = false;
    arma::mat X, Q, S;
    arma::vec lambda;
    std::vector<std::pair<Cut, double>> t_by_cut;
    double sigma = 0.0;
};

struct DnnResult {
    arma::mat Z;          // primal estimate, PSD and entrywise nonnegative (post-processed)
    DualEstimate dual;
    double primal_obj = 0.0;
    bool converged = false;
    int iterations = 0;
    double kkt_residual = 0.0;
};

// Augmented-Lagrangian splitting on the dual: a linear solve for the equality
// multipliers, clamped coordinate sweeps for cut multipliers, an entrywise
// clamp for Q, a PSD projection for the dual slack, then the multiplier step
// that doubles as the primal update.
DnnResult solve_dnn(const DnnRelaxation& rel, const DnnParams& params,
                    DnnWarmStart* warm = nullptr);

// Certified upper bound on the relaxation (hence the discrete) optimum from an
// arbitrary multiplier estimate: the dual value plus an eigenvalue correction
// of the assembled slack matrix. Negative entries in t or Q are rejected.
double safe_upper_bound(const DualEstimate& dual, const DnnRelaxation& rel);

struct CuttingPlaneParams {
    double sdp_tol = 1e-4;
    double stop_rel = 1e-3; // relative upper-bound improvement threshold
    int max_rounds = 25;
    int max_separate = 100000;
    int max_add = 10000;
    int max_iter = 5000;
    std::uint64_t seed = 0;
    double viol_tol = 1e-4;
    double slack_tol = 1e-5;
};

struct CuttingPlaneResult {
    double ub = 0.0;      // smallest safe upper bound seen
    arma::mat Z;          // final primal estimate
    CutPool pool;         // final cut pool
    int rounds = 0;
    bool all_converged = true;
    std::vector<double> ub_history; // one safe bound per round
};

// solve -> safe bound -> purge -> separate, until no violated cuts are found
// or the bound stops improving.
CuttingPlaneResult cutting_plane_bound(const AggregatedInstance& agg, const CutPool& initial,
                                       const CuttingPlaneParams& params);

} // namespace cbicl
