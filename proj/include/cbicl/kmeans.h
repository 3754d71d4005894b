#pragma once

#include <armadillo>
#include <cstdint>
#include <vector>

namespace cbicl {

// Lloyd iterations with farthest-first seeding from a seeded RNG.
// Every cluster is non-empty on return: an empty cluster is repaired by
// reassigning the point farthest from its own centroid.
// Returns 0-based cluster labels for the rows of `points`.
std::vector<int> kmeans(const arma::mat& points, int k, std::uint64_t seed,
                        int max_iter = 100);

// within-cluster sum of squared distances for given labels
double kmeans_sse(const arma::mat& points, const std::vector<int>& labels, int k);

} // namespace cbicl
