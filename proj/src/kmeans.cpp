#include "cbicl/kmeans.h"

#include <limits>
#include <stdexcept>

#include "cbicl/rng.h"

namespace cbicl {

namespace {

arma::mat centroids_of(const arma::mat& points, const std::vector<int>& labels, int k) {
    arma::mat centroids(k, points.n_cols, arma::fill::zeros);
    std::vector<int> counts(k, 0);
    for (size_t i = 0; i < labels.size(); ++i) {
        centroids.row(labels[i]) += points.row(i);
        counts[labels[i]]++;
    }
    for (int c = 0; c < k; ++c)
        if (counts[c] > 0) centroids.row(c) /= static_cast<double>(counts[c]);
    return centroids;
}

// move the point farthest from its own centroid into each empty cluster
void repair_empty(const arma::mat& points, std::vector<int>& labels, int k) {
    while (true) {
        std::vector<int> counts(k, 0);
        for (int lab : labels) counts[lab]++;
        int empty = -1;
        for (int c = 0; c < k; ++c)
            if (counts[c] == 0) {
                empty = c;
                break;
            }
        if (empty < 0) return;
        arma::mat centroids = centroids_of(points, labels, k);
        int worst = -1;
        double worst_dist = -1.0;
        for (size_t i = 0; i < labels.size(); ++i) {
            if (counts[labels[i]] <= 1) continue; // do not empty another cluster
            double d = arma::norm(points.row(i) - centroids.row(labels[i]));
            if (d > worst_dist) {
                worst_dist = d;
                worst = static_cast<int>(i);
            }
        }
        if (worst < 0) throw std::runtime_error("kmeans: cannot repair empty cluster");
        labels[worst] = empty;
    }
}

} // namespace

std::vector<int> kmeans(const arma::mat& points, int k, std::uint64_t seed, int max_iter) {
    const int n = static_cast<int>(points.n_rows);
    if (k < 1) throw std::invalid_argument("kmeans: k must be positive");
    if (n < k) throw std::invalid_argument("kmeans: fewer points than clusters");

    // farthest-first seeding
    Rng rng(seed);
    std::vector<int> center_idx;
    center_idx.push_back(rng.uniform_int(n));
    arma::vec min_dist(n);
    for (int i = 0; i < n; ++i)
        min_dist(i) = arma::norm(points.row(i) - points.row(center_idx[0]));
    while (static_cast<int>(center_idx.size()) < k) {
        int best = -1;
        double best_dist = -1.0;
        for (int i = 0; i < n; ++i) {
            bool taken = false;
            for (int c : center_idx)
                if (c == i) taken = true;
            if (taken) continue;
            if (min_dist(i) > best_dist) {
                best_dist = min_dist(i);
                best = i;
            }
        }
        center_idx.push_back(best);
        for (int i = 0; i < n; ++i)
            min_dist(i) = std::min(min_dist(i),
                                   arma::norm(points.row(i) - points.row(best)));
    }
    arma::mat centroids(k, points.n_cols);
    for (int c = 0; c < k; ++c) centroids.row(c) = points.row(center_idx[c]);

    std::vector<int> labels(n, 0);
    double prev_sse = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = arma::norm(points.row(i) - centroids.row(0));
            for (int c = 1; c < k; ++c) {
                double d = arma::norm(points.row(i) - centroids.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        repair_empty(points, labels, k);
        centroids = centroids_of(points, labels, k);
        double sse = kmeans_sse(points, labels, k);
        if (!changed || sse >= prev_sse - 1e-14) break;
        prev_sse = sse;
    }
    return labels;
}

double kmeans_sse(const arma::mat& points, const std::vector<int>& labels, int k) {
    arma::mat centroids = centroids_of(points, labels, k);
    double sse = 0.0;
    for (size_t i = 0; i < labels.size(); ++i) {
        arma::rowvec d = points.row(i) - centroids.row(labels[i]);
        sse += arma::dot(d, d);
    }
    return sse;
}

} // namespace cbicl
