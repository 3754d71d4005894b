#include "cbicl/side_operator.h"

#include <stdexcept>

namespace cbicl {

SideOperator::SideOperator(arma::vec sizes, int k_, const std::set<IndexPair>& cl_pairs)
    : e(std::move(sizes)), k(k_), cl(cl_pairs.begin(), cl_pairs.end()) {}

arma::vec SideOperator::rhs() const {
    arma::vec b(count(), arma::fill::zeros);
    b.head(dim()).ones();
    b(dim()) = static_cast<double>(k);
    return b;
}

arma::vec SideOperator::apply(const arma::mat& Z) const {
    const int d = dim();
    arma::vec out(count());
    out.head(d) = Z * e;
    out(d) = arma::dot(e, Z.diag());
    for (size_t c = 0; c < cl.size(); ++c)
        out(d + 1 + c) = Z(cl[c].first - 1, cl[c].second - 1);
    return out;
}

arma::mat SideOperator::apply_adjoint(const arma::vec& lambda) const {
    const int d = dim();
    if (static_cast<int>(lambda.n_elem) != count())
        throw std::invalid_argument("SideOperator: multiplier length mismatch");
    arma::vec y = lambda.head(d);
    double alpha = lambda(d);
    arma::mat M = 0.5 * (y * e.t() + e * y.t());
    M.diag() += alpha * e;
    for (size_t c = 0; c < cl.size(); ++c) {
        double half = 0.5 * lambda(d + 1 + c);
        M(cl[c].first - 1, cl[c].second - 1) += half;
        M(cl[c].second - 1, cl[c].first - 1) += half;
    }
    return M;
}

arma::vec SideOperator::apply_gram(const arma::mat& F) const {
    const int d = dim();
    arma::vec out(count());
    out.head(d) = F * (F.t() * e);
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += e(i) * arma::dot(F.row(i), F.row(i));
    out(d) = tr;
    for (size_t c = 0; c < cl.size(); ++c)
        out(d + 1 + c) = arma::dot(F.row(cl[c].first - 1), F.row(cl[c].second - 1));
    return out;
}

arma::mat SideOperator::apply_adjoint_times(const arma::vec& lambda, const arma::mat& F) const {
    const int d = dim();
    arma::vec y = lambda.head(d);
    double alpha = lambda(d);
    arma::mat out = 0.5 * (y * (e.t() * F) + e * (y.t() * F));
    for (int i = 0; i < d; ++i) out.row(i) += alpha * e(i) * F.row(i);
    for (size_t c = 0; c < cl.size(); ++c) {
        double half = 0.5 * lambda(d + 1 + c);
        int a = cl[c].first - 1, b = cl[c].second - 1;
        out.row(a) += half * F.row(b);
        out.row(b) += half * F.row(a);
    }
    return out;
}

arma::mat SideOperator::gram() const {
    const int m = count();
    arma::mat G(m, m);
    std::vector<arma::mat> mats(m);
    arma::vec unit(m, arma::fill::zeros);
    for (int r = 0; r < m; ++r) {
        unit(r) = 1.0;
        mats[r] = apply_adjoint(unit);
        unit(r) = 0.0;
    }
    for (int r = 0; r < m; ++r)
        for (int s = r; s < m; ++s) G(r, s) = G(s, r) = arma::dot(mats[r].as_col(), mats[s].as_col());
    return G;
}

} // namespace cbicl
