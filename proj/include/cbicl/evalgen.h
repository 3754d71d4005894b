#pragma once

#include <cstdint>
#include <optional>

#include "cbicl/aggregate.h"
#include "cbicl/types.h"

namespace cbicl {

/// Synthetic instance with known ground-truth blocks.
struct PlantedInstance {
    WeightMatrix A;
    std::vector<int> row_truth; // 1..k
    std::vector<int> col_truth;
    int k = 0;
    double noise_sigma = 0.0;
};

// Planted biclustering model: k near-even groups per side; within-block weights
// uniform on [0,1], off-block 0; Gaussian noise added to every entry.
PlantedInstance generate_planted(int n, int m, int k, double noise_sigma, std::uint64_t seed);

// nearest integer, ties away from zero upward (2.5 -> 3)
int round_half_up(double x);

struct ConstraintQuotas {
    int ml_u = 0, cl_u = 0, ml_v = 0, cl_v = 0;
};

// Random distinct pairs labeled ML/CL by the truth labels until quotas are met,
// then a ceil(violation_frac * total) random subset gets its type flipped.
PairwiseConstraints sample_constraints(const std::vector<int>& row_truth,
                                       const std::vector<int>& col_truth,
                                       const ConstraintQuotas& quotas, double violation_frac,
                                       std::uint64_t seed);

// adjusted Rand index, pair-counting form
double ari(const std::vector<int>& a, const std::vector<int>& b);

// mutual information normalized by the arithmetic mean of the entropies; 0/0 -> 0
double nmi(const std::vector<int>& a, const std::vector<int>& b);

struct OracleResult {
    std::optional<Biclustering> best;
    double objective = 0.0;
    bool infeasible() const { return !best.has_value(); }
};

// Exhaustive optimum for n, m <= 8: enumerate surjective labelings (rows
// deduplicated up to label permutation), filter by feasibility, and pair row
// and column clusters with an exact linear assignment per candidate.
OracleResult brute_force_optimum(const WeightMatrix& A, const PairwiseConstraints& con, int k);

} // namespace cbicl
