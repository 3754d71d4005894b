#pragma once

#include <cstdint>
#include <limits>

#include "cbicl/dnn_solver.h"
#include "cbicl/solver_result.h"

namespace cbicl {

struct ExactParams {
    double gap_tol = 1e-3;
    double sdp_tol = 1e-4;
    double cp_stop_rel = 1e-3;
    int max_separate = 100000;
    int max_add = 10000;
    int cp_max_rounds = 25;
    int admm_max_iter = 5000;
    double time_limit_s = 0.0; // <= 0 means unlimited
    std::uint64_t seed = 0;
    long max_nodes = 1000000;
};

struct BranchPair {
    bool found = false;
    char side = 'U';
    int i = 0, j = 0; // 1-based aggregated indices
    double score = 0.0;
};

// Most ambiguous pair per the relaxation solution: argmax over unconstrained
// ordered pairs of |side| * min{Z_ij, Z_ii - Z_ij}, U side scanned first and
// lexicographic order breaking ties. Scores below 1e-6 signal a leaf.
BranchPair select_branching_pair(const arma::mat& Z, const AggregatedInstance& agg);

// Best-first branch-and-cut with cutting-plane bounding, per-node rounding,
// cut inheritance and must-link / cannot-link branching.
SolverResult solve_exact(const WeightMatrix& A, const PairwiseConstraints& con, int k,
                         const ExactParams& params);

} // namespace cbicl
