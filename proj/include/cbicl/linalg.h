#pragma once

#include <armadillo>

namespace cbicl {

// symmetrize by averaging; inputs to the symmetric kernels go through this
inline arma::mat symmetrize(const arma::mat& M) { return 0.5 * (M + M.t()); }

struct EigResult {
    arma::vec values;  // descending
    arma::mat vectors; // columns, orthonormal, aligned with values
};

// Dense symmetric eigendecomposition, M = V Diag(values) V^T.
// Throws std::runtime_error when the underlying factorization fails to converge.
EigResult sym_eig(const arma::mat& M);

// Frobenius-nearest positive semidefinite matrix (negative eigenvalues clamped).
arma::mat project_psd(const arma::mat& M);

// entrywise clamp to [lo, hi]
arma::mat project_box(const arma::mat& M, double lo, double hi);

} // namespace cbicl
