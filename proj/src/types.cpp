#include "cbicl/types.h"

#include <stdexcept>
#include <string>

namespace cbicl {

WeightMatrix::WeightMatrix(arma::mat weights) : A(std::move(weights)) {
    if (A.n_rows < 1 || A.n_cols < 1)
        throw std::invalid_argument("weight matrix must be at least 1x1");
    if (!A.is_finite())
        throw std::invalid_argument("weight matrix entries must be finite");
}

void PairwiseConstraints::add(std::set<IndexPair>& target, int i, int j) {
    if (i == j)
        throw std::invalid_argument("constraint pair (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") is a self-pair");
    if (i < 1 || j < 1)
        throw std::invalid_argument("constraint indices are 1-based positive integers");
    target.insert(make_pair_canonical(i, j));
}

static void check_range(const std::set<IndexPair>& pairs, int limit, const char* name) {
    for (const auto& [i, j] : pairs) {
        if (i < 1 || j < 1 || i > limit || j > limit)
            throw std::invalid_argument(std::string(name) + " pair index out of range");
        if (i == j)
            throw std::invalid_argument(std::string(name) + " contains a self-pair");
    }
}

void PairwiseConstraints::validate(int n, int m) const {
    check_range(ml_u, n, "ML_U");
    check_range(cl_u, n, "CL_U");
    check_range(ml_v, m, "ML_V");
    check_range(cl_v, m, "CL_V");
}

Biclustering::Biclustering(int k_, std::vector<int> rows, std::vector<int> cols)
    : k(k_), row_labels(std::move(rows)), col_labels(std::move(cols)) {}

void Biclustering::validate() const {
    if (k < 2)
        throw std::invalid_argument("number of bicliques k must be >= 2");
    std::vector<int> used_r(k, 0), used_c(k, 0);
    for (int lab : row_labels) {
        if (lab < 1 || lab > k)
            throw std::invalid_argument("row label out of range 1..k");
        used_r[lab - 1]++;
    }
    for (int lab : col_labels) {
        if (lab < 1 || lab > k)
            throw std::invalid_argument("column label out of range 1..k");
        used_c[lab - 1]++;
    }
    for (int j = 0; j < k; ++j)
        if (used_r[j] == 0 || used_c[j] == 0)
            throw std::invalid_argument("cluster " + std::to_string(j + 1) +
                                        " is empty on one side");
}

arma::mat Biclustering::assignment_u() const {
    arma::mat X(row_labels.size(), k, arma::fill::zeros);
    for (size_t i = 0; i < row_labels.size(); ++i) X(i, row_labels[i] - 1) = 1.0;
    return X;
}

arma::mat Biclustering::assignment_v() const {
    arma::mat X(col_labels.size(), k, arma::fill::zeros);
    for (size_t i = 0; i < col_labels.size(); ++i) X(i, col_labels[i] - 1) = 1.0;
    return X;
}

double total_density(const WeightMatrix& A, const Biclustering& sol) {
    if (static_cast<int>(sol.row_labels.size()) != A.n() ||
        static_cast<int>(sol.col_labels.size()) != A.m())
        throw std::invalid_argument("solution dimensions do not match the weight matrix");
    sol.validate();

    std::vector<double> weight(sol.k, 0.0);
    std::vector<int> size_u(sol.k, 0), size_v(sol.k, 0);
    for (int i = 0; i < A.n(); ++i) size_u[sol.row_labels[i] - 1]++;
    for (int j = 0; j < A.m(); ++j) size_v[sol.col_labels[j] - 1]++;
    for (int i = 0; i < A.n(); ++i) {
        int li = sol.row_labels[i] - 1;
        for (int j = 0; j < A.m(); ++j)
            if (sol.col_labels[j] - 1 == li) weight[li] += A.A(i, j);
    }
    double total = 0.0;
    for (int j = 0; j < sol.k; ++j)
        total += weight[j] / std::sqrt(static_cast<double>(size_u[j]) * size_v[j]);
    return total;
}

bool check_feasible(const Biclustering& sol, const PairwiseConstraints& con) {
    for (const auto& [i, j] : con.ml_u)
        if (sol.row_labels[i - 1] != sol.row_labels[j - 1]) return false;
    for (const auto& [i, j] : con.cl_u)
        if (sol.row_labels[i - 1] == sol.row_labels[j - 1]) return false;
    for (const auto& [i, j] : con.ml_v)
        if (sol.col_labels[i - 1] != sol.col_labels[j - 1]) return false;
    for (const auto& [i, j] : con.cl_v)
        if (sol.col_labels[i - 1] == sol.col_labels[j - 1]) return false;
    return true;
}

} // namespace cbicl
