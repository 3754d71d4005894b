#pragma once

#include <armadillo>
#include <cstdint>
#include <optional>
#include <vector>

#include "cbicl/aggregate.h"
#include "cbicl/types.h"

namespace cbicl {

/// ILP of the rounding step: re-label rows to agree with a reference
/// assignment as much as possible subject to cannot-link pairs and
/// non-empty clusters.
struct RepairProblem {
    std::vector<int> reference;   // 0-based reference labels, one per row
    std::set<IndexPair> cl_pairs; // 1-based row pairs that must get distinct labels
    int k = 0;
};

// Exact optimum by depth-first branch and bound with constraint propagation.
// `order` optionally fixes the assignment order of the rows (0-based indices);
// default is descending cannot-link degree, ties by index. Returns std::nullopt
// when no feasible assignment exists.
std::optional<std::vector<int>> repair_assignment(const RepairProblem& problem,
                                                  const std::vector<int>* order = nullptr);

struct RoundResult {
    std::optional<Biclustering> solution;
    double objective = 0.0;
    bool feasible() const { return solution.has_value(); }
};

// k-means on the rows/columns of the UV block of Z, ILP repair against the
// projected cannot-link sets, expansion through the must-link components, and
// a linear assignment that pairs row clusters with column clusters.
RoundResult round_solution(const arma::mat& Z, const AggregatedInstance& agg,
                           const WeightMatrix& A, const PairwiseConstraints& original_con,
                           std::uint64_t seed);

} // namespace cbicl
