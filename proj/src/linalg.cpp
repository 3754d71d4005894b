#include "cbicl/linalg.h"

#include <stdexcept>

namespace cbicl {

EigResult sym_eig(const arma::mat& M) {
    if (!M.is_finite()) throw std::invalid_argument("sym_eig: matrix has non-finite entries");
    arma::mat S = symmetrize(M);
    arma::vec vals;
    arma::mat vecs;
    if (!arma::eig_sym(vals, vecs, S)) {
        double residual = arma::norm(S, "fro");
        throw std::runtime_error("sym_eig: eigendecomposition did not converge, ||M||_F=" +
                                 std::to_string(residual));
    }
    // LAPACK returns ascending order
    EigResult out;
    out.values = arma::reverse(vals);
    out.vectors = arma::fliplr(vecs);
    return out;
}

arma::mat project_psd(const arma::mat& M) {
    EigResult eig = sym_eig(M);
    arma::vec clamped = arma::clamp(eig.values, 0.0, arma::datum::inf);
    arma::mat P = eig.vectors * arma::diagmat(clamped) * eig.vectors.t();
    return symmetrize(P);
}

arma::mat project_box(const arma::mat& M, double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("project_box: lo > hi");
    return arma::clamp(M, lo, hi);
}

} // namespace cbicl
