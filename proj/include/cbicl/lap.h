#pragma once

#include <armadillo>
#include <vector>

namespace cbicl {

// Exact linear assignment: permutation p maximizing sum_i W(i, p[i]).
// Shortest-augmenting-path method with potentials, O(k^3). Square input only.
std::vector<int> solve_lap_max(const arma::mat& W);

double lap_value(const arma::mat& W, const std::vector<int>& perm);

} // namespace cbicl
