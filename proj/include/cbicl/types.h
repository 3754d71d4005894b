#pragma once

#include <armadillo>
#include <set>
#include <utility>
#include <vector>

namespace cbicl {

// Unordered vertex pair, stored canonically as (min, max), 1-based indices.
using IndexPair = std::pair<int, int>;

inline IndexPair make_pair_canonical(int i, int j) {
    return (i < j) ? IndexPair{i, j} : IndexPair{j, i};
}

/// Edge weights of the complete bipartite graph; rows are U-vertices, columns V-vertices.
struct WeightMatrix {
    arma::mat A; // n x m, any finite reals

    WeightMatrix() = default;
    explicit WeightMatrix(arma::mat weights);

    int n() const { return static_cast<int>(A.n_rows); }
    int m() const { return static_cast<int>(A.n_cols); }
};

/// Must-link / cannot-link pairs on each side, 1-based, canonical (min,max).
struct PairwiseConstraints {
    std::set<IndexPair> ml_u, cl_u, ml_v, cl_v;

    void add(std::set<IndexPair>& target, int i, int j);
    void validate(int n, int m) const; // index ranges and no self-pairs
    bool empty() const { return ml_u.empty() && cl_u.empty() && ml_v.empty() && cl_v.empty(); }
};

/// k matched bicliques given by row/column cluster labels in 1..k.
struct Biclustering {
    int k = 0;
    std::vector<int> row_labels; // length n, values 1..k
    std::vector<int> col_labels; // length m, values 1..k

    Biclustering() = default;
    Biclustering(int k, std::vector<int> rows, std::vector<int> cols);

    // throws std::invalid_argument on out-of-range labels or an empty cluster
    void validate() const;

    // derived 0/1 assignment matrices (never stored)
    arma::mat assignment_u() const;
    arma::mat assignment_v() const;
};

// Sum over bicliques of (total weight) / sqrt(|U_j| * |V_j|).
double total_density(const WeightMatrix& A, const Biclustering& sol);

// True iff every ML pair shares a label and every CL pair has distinct labels, both sides.
bool check_feasible(const Biclustering& sol, const PairwiseConstraints& con);

} // namespace cbicl
