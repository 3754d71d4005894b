#pragma once

#include <armadillo>
#include <cstdint>
#include <set>
#include <tuple>
#include <vector>

#include "cbicl/aggregate.h"

namespace cbicl {

// Pair inequality (i,j):        Z_ij - Z_ii <= 0, i is the diagonal vertex.
// Triangle inequality (i,j,h):  Z_ij + Z_ih - Z_ii - Z_jh <= 0, i is the apex,
//                               stored with j < h.
// Indices are 1-based within the side's aggregated block.
struct Cut {
    char side = 'U';  // 'U' or 'V'
    char kind = 'p';  // 'p' pair, 't' triangle
    int i = 0, j = 0, h = 0;

    auto key() const { return std::make_tuple(side, kind, i, j, h); }
    bool operator==(const Cut& o) const { return key() == o.key(); }
    bool operator<(const Cut& o) const { return key() < o.key(); }
};

struct CutPool {
    std::vector<Cut> cuts;
    std::set<std::tuple<char, char, int, int, int>> index;

    bool contains(const Cut& c) const { return index.count(c.key()) > 0; }
    bool add(const Cut& c) {
        if (!index.insert(c.key()).second) return false;
        cuts.push_back(c);
        return true;
    }
    int size() const { return static_cast<int>(cuts.size()); }
    void clear() {
        cuts.clear();
        index.clear();
    }
};

// value of the cut's left-hand side at the full (n_bar+m_bar) matrix Z;
// positive value = violated by that amount
double cut_value(const Cut& c, const arma::mat& Z, int n_bar);

// accumulate weight * C_cut into the full symmetric matrix M
void add_cut_adjoint(const Cut& c, double weight, arma::mat& M, int n_bar);

// Frobenius norm squared of the cut's constraint matrix (1.5 pair, 2.5 triangle)
double cut_norm_sq(const Cut& c);

// entries of the cut's constraint matrix in full-matrix coordinates (0-based)
std::vector<std::tuple<int, int, double>> cut_entries(const Cut& c, int n_bar);

// Sample up to max_separate candidate inequalities per side (exhaustively when
// the side is small enough), keep those violated by more than viol_tol, sort by
// violation descending and return at most max_add not already in the pool.
std::vector<Cut> separate_cuts(const arma::mat& Z, const AggregatedInstance& agg,
                               const CutPool& pool, int max_separate, int max_add,
                               std::uint64_t seed, double viol_tol = 1e-4);

// drop cuts whose slack at Z exceeds slack_tol
CutPool purge_inactive(const CutPool& pool, const arma::mat& Z, int n_bar,
                       double slack_tol = 1e-5);

// Remap a pool after merging components (old index -> new index, 1-based) on
// one side; cuts whose indices collapse are dropped, duplicates are removed.
CutPool remap_cuts(const CutPool& pool, char side, const std::vector<int>& remap);

} // namespace cbicl
