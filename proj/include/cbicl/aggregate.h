#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbicl/types.h"

namespace cbicl {

/// Why an instance (or node) admits no feasible biclustering.
struct InfeasibleReport {
    std::string reason;
    char side = ' ';               // 'U' or 'V' when a witnessing pair exists
    IndexPair witness{0, 0};       // original-vertex pair, when applicable
};

/// Instance after collapsing must-link components into aggregated vertices.
/// Components on each side are numbered by smallest contained original index.
struct AggregatedInstance {
    int k = 0;
    std::vector<std::vector<int>> comp_u; // sorted original indices (1-based) per component
    std::vector<std::vector<int>> comp_v;
    arma::vec e_u, e_v;                   // component sizes, e = T 1
    arma::mat a_bar;                      // T_U A T_V^T
    std::set<IndexPair> cl_u, cl_v;       // projected cannot-link sets, aggregated 1-based

    int n_bar() const { return static_cast<int>(comp_u.size()); }
    int m_bar() const { return static_cast<int>(comp_v.size()); }

    // component index (1-based) of an original vertex
    int comp_of_u(int orig) const;
    int comp_of_v(int orig) const;

    // materialized must-link matrices (derived views)
    arma::mat t_u() const;
    arma::mat t_v() const;
};

struct AggregateOutcome {
    std::optional<AggregatedInstance> agg;
    std::optional<InfeasibleReport> infeasible;
    bool ok() const { return agg.has_value(); }
};

// Connected components of the must-link graphs, projected cannot-link sets,
// and conflict detection (ML/CL self-pair, fewer components than k).
AggregateOutcome aggregate(const WeightMatrix& A, const PairwiseConstraints& con, int k);

// Lift an aggregated solution back to original vertices (each vertex takes its
// component's label). Preserves the objective value.
Biclustering expand(const AggregatedInstance& agg, const Biclustering& sol_bar);

struct MergeResult {
    AggregatedInstance agg;
    std::vector<int> remap; // old aggregated index (1-based) -> new aggregated index
};

// Union components i and j on the given side ('U' or 'V') and rebuild the
// aggregated data. Rejects pairs in the projected cannot-link set.
MergeResult merge_components(const AggregatedInstance& agg, char side, int i, int j);

} // namespace cbicl
