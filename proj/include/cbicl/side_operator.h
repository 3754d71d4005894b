#pragma once

#include <armadillo>
#include <vector>

#include "cbicl/aggregate.h"

namespace cbicl {

// Equality-constraint operator for one side of the relaxation, acting on the
// d x d symmetric block Z_SS:
//   rows 0..d-1 : (Z e)_i = 1          (row sums against component sizes)
//   row  d      : <Diag(e), Z> = k     (trace constraint)
//   rows d+1..  : Z_ij = 0             (projected cannot-link entries)
// Multiplier layout matches: lambda = [y; alpha; tau].
struct SideOperator {
    arma::vec e;                 // component sizes
    int k = 0;
    std::vector<IndexPair> cl;   // 1-based, sorted canonically

    SideOperator() = default;
    SideOperator(arma::vec sizes, int k_, const std::set<IndexPair>& cl_pairs);

    int dim() const { return static_cast<int>(e.n_elem); }
    int count() const { return dim() + 1 + static_cast<int>(cl.size()); }

    arma::vec rhs() const; // b = [1_d; k; 0...]

    arma::vec apply(const arma::mat& Z) const;            // A(Z)
    arma::mat apply_adjoint(const arma::vec& lambda) const; // A^T(lambda)

    // low-rank forms that avoid materializing F F^T
    arma::vec apply_gram(const arma::mat& F) const;        // A(F F^T)
    arma::mat apply_adjoint_times(const arma::vec& lambda, const arma::mat& F) const; // A^T(lambda) F

    arma::mat gram() const; // Gram matrix of the constraint matrices, A A^T
};

} // namespace cbicl
