#include "cbicl/rounding.h"

#include <algorithm>
#include <stdexcept>

#include "cbicl/kmeans.h"
#include "cbicl/lap.h"
#include "cbicl/rng.h"

namespace cbicl {

namespace {

struct RepairSearch {
    const std::vector<int>& order;
    const std::vector<std::vector<int>>& adj; // cannot-link neighbours (0-based)
    int k;
    int d;
    const std::vector<int>& reference;

    std::vector<int> labels;      // current assignment, -1 unassigned
    std::vector<int> label_count; // usage per label
    std::vector<int> best;
    int best_score = -1;
    long long nodes = 0;

    RepairSearch(const std::vector<int>& order_, const std::vector<std::vector<int>>& adj_,
                 int k_, const std::vector<int>& ref)
        : order(order_), adj(adj_), k(k_), d(static_cast<int>(ref.size())), reference(ref),
          labels(ref.size(), -1), label_count(k_, 0) {}

    bool label_allowed(int row, int lab) const {
        for (int nb : adj[row])
            if (labels[nb] == lab) return false;
        return true;
    }

    void dfs(int pos, int score) {
        ++nodes;
        if (score + (d - pos) <= best_score) return; // cannot beat the incumbent
        if (pos == d) {
            best_score = score;
            best = labels;
            return;
        }
        int row = order[pos];
        int remaining_after = d - pos - 1;
        int unused = 0;
        for (int c = 0; c < k; ++c)
            if (label_count[c] == 0) unused++;

        // reference label first, then the rest in index order
        for (int attempt = 0; attempt < k; ++attempt) {
            int lab;
            if (attempt == 0) {
                lab = reference[row];
            } else {
                lab = attempt - (attempt <= reference[row] ? 1 : 0);
            }
            if (!label_allowed(row, lab)) continue;
            int unused_after = unused - (label_count[lab] == 0 ? 1 : 0);
            if (unused_after > remaining_after) continue; // cannot fill remaining labels
            labels[row] = lab;
            label_count[lab]++;
            dfs(pos + 1, score + (lab == reference[row] ? 1 : 0));
            label_count[lab]--;
            labels[row] = -1;
        }
    }
};

} // namespace

std::optional<std::vector<int>> repair_assignment(const RepairProblem& problem,
                                                  const std::vector<int>* order) {
    const int d = static_cast<int>(problem.reference.size());
    const int k = problem.k;
    if (k < 2) throw std::invalid_argument("repair_assignment: k must be >= 2");
    if (d < k) return std::nullopt;
    for (int lab : problem.reference)
        if (lab < 0 || lab >= k)
            throw std::invalid_argument("repair_assignment: reference label out of range");

    std::vector<std::vector<int>> adj(d);
    for (const auto& [i, j] : problem.cl_pairs) {
        if (i < 1 || j < 1 || i > d || j > d)
            throw std::invalid_argument("repair_assignment: cannot-link index out of range");
        adj[i - 1].push_back(j - 1);
        adj[j - 1].push_back(i - 1);
    }

    std::vector<int> default_order;
    if (!order) {
        default_order.resize(d);
        for (int i = 0; i < d; ++i) default_order[i] = i;
        std::stable_sort(default_order.begin(), default_order.end(), [&](int a, int b) {
            return adj[a].size() > adj[b].size();
        });
        order = &default_order;
    }

    RepairSearch search(*order, adj, k, problem.reference);
    search.dfs(0, 0);
    if (search.best_score < 0) return std::nullopt;
    return search.best;
}

RoundResult round_solution(const arma::mat& Z, const AggregatedInstance& agg,
                           const WeightMatrix& A, const PairwiseConstraints& original_con,
                           std::uint64_t seed) {
    const int nb = agg.n_bar(), mb = agg.m_bar(), k = agg.k;
    if (static_cast<int>(Z.n_rows) != nb + mb)
        throw std::invalid_argument("round_solution: Z dimension mismatch");
    RoundResult out;

    arma::mat Z_uv = Z.submat(0, nb, nb - 1, nb + mb - 1);

    auto norm_order = [](const arma::mat& points) {
        std::vector<int> order(points.n_rows);
        for (size_t i = 0; i < points.n_rows; ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return arma::norm(points.row(a)) > arma::norm(points.row(b));
        });
        return order;
    };

    // row side
    RepairProblem pu;
    pu.k = k;
    pu.reference = kmeans(Z_uv, k, derive_seed(seed, 11));
    pu.cl_pairs = agg.cl_u;
    std::vector<int> order_u = norm_order(Z_uv);
    auto labels_u = repair_assignment(pu, &order_u);
    if (!labels_u) return out;

    // column side
    arma::mat Z_vu = Z_uv.t();
    RepairProblem pv;
    pv.k = k;
    pv.reference = kmeans(Z_vu, k, derive_seed(seed, 12));
    pv.cl_pairs = agg.cl_v;
    std::vector<int> order_v = norm_order(Z_vu);
    auto labels_v = repair_assignment(pv, &order_v);
    if (!labels_v) return out;

    // expand through the must-link components
    std::vector<int> rows(A.n()), cols(A.m());
    for (int c = 0; c < nb; ++c)
        for (int v : agg.comp_u[c]) rows[v - 1] = (*labels_u)[c] + 1;
    for (int c = 0; c < mb; ++c)
        for (int v : agg.comp_v[c]) cols[v - 1] = (*labels_v)[c] + 1;

    // pair row clusters with column clusters by densities
    std::vector<int> size_u(k, 0), size_v(k, 0);
    for (int lab : rows) size_u[lab - 1]++;
    for (int lab : cols) size_v[lab - 1]++;
    arma::mat w(k, k, arma::fill::zeros);
    for (int i = 0; i < A.n(); ++i) {
        int g = rows[i] - 1;
        for (int j = 0; j < A.m(); ++j) w(g, cols[j] - 1) += A.A(i, j);
    }
    for (int g = 0; g < k; ++g)
        for (int h = 0; h < k; ++h)
            w(g, h) /= std::sqrt(static_cast<double>(size_u[g]) * size_v[h]);
    std::vector<int> perm = solve_lap_max(w);

    // relabel column clusters: the cluster paired with row cluster g becomes g+1
    std::vector<int> new_label(k + 1, 0);
    for (int g = 0; g < k; ++g) new_label[perm[g] + 1] = g + 1;
    for (int& lab : cols) lab = new_label[lab];

    Biclustering sol(k, std::move(rows), std::move(cols));
    sol.validate();
    if (!check_feasible(sol, original_con))
        throw std::logic_error("round_solution produced an infeasible biclustering");
    out.objective = total_density(A, sol);
    out.solution = std::move(sol);
    return out;
}

} // namespace cbicl
