#include "cbicl/dnn_solver.h"

#include <algorithm>
#include <stdexcept>

#include "cbicl/linalg.h"
#include "cbicl/rng.h"

namespace cbicl {

DnnRelaxation DnnRelaxation::build(const AggregatedInstance& agg, CutPool cuts) {
    DnnRelaxation rel;
    rel.agg = agg;
    rel.cuts = std::move(cuts);
    rel.op_u = SideOperator(agg.e_u, agg.k, agg.cl_u);
    rel.op_v = SideOperator(agg.e_v, agg.k, agg.cl_v);
    rel.N = agg.n_bar() + agg.m_bar();
    rel.W.zeros(rel.N, rel.N);
    rel.W.submat(0, agg.n_bar(), agg.n_bar() - 1, rel.N - 1) = 0.5 * agg.a_bar;
    rel.W.submat(agg.n_bar(), 0, rel.N - 1, agg.n_bar() - 1) = 0.5 * agg.a_bar.t();
    rel.b = arma::join_cols(rel.op_u.rhs(), rel.op_v.rhs());
    rel.d_min = 1.0 / agg.e_u.min() + 1.0 / agg.e_v.min();
    return rel;
}

arma::vec DnnRelaxation::apply_equalities(const arma::mat& Z) const {
    const int nb = n_bar();
    arma::vec au = op_u.apply(Z.submat(0, 0, nb - 1, nb - 1));
    arma::vec av = op_v.apply(Z.submat(nb, nb, N - 1, N - 1));
    return arma::join_cols(au, av);
}

arma::mat DnnRelaxation::adjoint_equalities(const arma::vec& lambda) const {
    const int nb = n_bar();
    arma::mat M(N, N, arma::fill::zeros);
    M.submat(0, 0, nb - 1, nb - 1) = op_u.apply_adjoint(lambda.head(op_u.count()));
    M.submat(nb, nb, N - 1, N - 1) = op_v.apply_adjoint(lambda.tail(op_v.count()));
    return M;
}

arma::mat DnnRelaxation::adjoint_cuts(const arma::vec& t) const {
    arma::mat M(N, N, arma::fill::zeros);
    for (int c = 0; c < cuts.size(); ++c) add_cut_adjoint(cuts.cuts[c], t(c), M, n_bar());
    return M;
}

arma::vec DnnRelaxation::cut_values(const arma::mat& Z) const {
    arma::vec v(cuts.size());
    for (int c = 0; c < cuts.size(); ++c) v(c) = cut_value(cuts.cuts[c], Z, n_bar());
    return v;
}

arma::mat DnnRelaxation::equality_gram() const {
    arma::mat gu = op_u.gram();
    arma::mat gv = op_v.gram();
    arma::mat G(gu.n_rows + gv.n_rows, gu.n_cols + gv.n_cols, arma::fill::zeros);
    G.submat(0, 0, gu.n_rows - 1, gu.n_cols - 1) = gu;
    G.submat(gu.n_rows, gu.n_cols, G.n_rows - 1, G.n_cols - 1) = gv;
    return G;
}

namespace {

// Cholesky with escalating ridge; the Gram matrix turns singular when the
// trace constraint becomes dependent on row sums at heavily constrained nodes.
arma::mat chol_with_ridge(const arma::mat& G) {
    double scale = arma::trace(G) / G.n_rows;
    for (double ridge : {0.0, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4}) {
        arma::mat R;
        if (arma::chol(R, G + ridge * scale * arma::eye(G.n_rows, G.n_cols))) return R;
    }
    throw std::runtime_error("equality Gram matrix could not be factorized");
}

arma::vec chol_solve(const arma::mat& R, const arma::vec& rhs) {
    arma::vec y = arma::solve(arma::trimatl(R.t()), rhs);
    return arma::solve(arma::trimatu(R), y);
}

struct DualPack {
    arma::vec lambda; // stacked [lambda_u; lambda_v]
    arma::vec t;
    arma::mat Q, S;
};

DualEstimate unpack_dual(const DnnRelaxation& rel, const DualPack& d) {
    DualEstimate out;
    const int cu = rel.op_u.count();
    arma::vec lu = d.lambda.head(cu);
    arma::vec lv = d.lambda.tail(rel.op_v.count());
    out.y_u = lu.head(rel.n_bar());
    out.alpha_u = lu(rel.n_bar());
    out.tau_u = lu.tail(static_cast<int>(rel.op_u.cl.size()));
    out.y_v = lv.head(rel.m_bar());
    out.alpha_v = lv(rel.m_bar());
    out.tau_v = lv.tail(static_cast<int>(rel.op_v.cl.size()));
    int p = 0, q = 0;
    for (const Cut& c : rel.cuts.cuts) (c.side == 'U' ? p : q)++;
    out.t_u.set_size(p);
    out.t_v.set_size(q);
    int ip = 0, iq = 0;
    for (int c = 0; c < rel.cuts.size(); ++c) {
        if (rel.cuts.cuts[c].side == 'U')
            out.t_u(ip++) = d.t(c);
        else
            out.t_v(iq++) = d.t(c);
    }
    out.Q = d.Q;
    return out;
}

} // namespace

DnnResult solve_dnn(const DnnRelaxation& rel, const DnnParams& params, DnnWarmStart* warm) {
    const int N = rel.N;
    const int me = static_cast<int>(rel.b.n_elem);
    const int mc = rel.cuts.size();

    arma::mat gram = rel.equality_gram();
    arma::mat R = chol_with_ridge(gram);

    // cut constraint matrices as sparse entry lists in full coordinates
    std::vector<std::vector<std::tuple<int, int, double>>> cut_mat(mc);
    arma::vec cut_nsq(std::max(mc, 1));
    for (int c = 0; c < mc; ++c) {
        cut_mat[c] = cut_entries(rel.cuts.cuts[c], rel.n_bar());
        cut_nsq(c) = cut_norm_sq(rel.cuts.cuts[c]);
    }
    auto sparse_dot = [&](int c, const arma::mat& M) {
        double s = 0.0;
        for (const auto& [r, col, v] : cut_mat[c]) s += v * M(r, col);
        return s;
    };

    DualPack dp;
    dp.lambda.zeros(me);
    dp.t.zeros(mc);
    dp.Q.zeros(N, N);
    dp.S.zeros(N, N);
    arma::mat X(N, N, arma::fill::zeros);
    double sigma = params.sigma0;

    if (warm && warm->valid && static_cast<int>(warm->lambda.n_elem) == me &&
        static_cast<int>(warm->X.n_rows) == N) {
        X = warm->X;
        dp.Q = warm->Q;
        dp.S = warm->S;
        dp.lambda = warm->lambda;
        sigma = warm->sigma > 0 ? warm->sigma : sigma;
        for (int c = 0; c < mc; ++c)
            for (const auto& [cut, val] : warm->t_by_cut)
                if (cut == rel.cuts.cuts[c]) {
                    dp.t(c) = val;
                    break;
                }
    }

    // dual residual G = A^T(lambda) + B^T(t) - Q - S - W, maintained incrementally
    arma::mat G = rel.adjoint_equalities(dp.lambda) + rel.adjoint_cuts(dp.t) - dp.Q - dp.S - rel.W;

    const double norm_b = arma::norm(rel.b);
    const double norm_w = arma::norm(rel.W, "fro");

    double err = arma::datum::inf;
    int iter = 0;
    bool converged = false;
    for (iter = 1; iter <= params.max_iter; ++iter) {
        // equality multipliers: sigma * AA^T (lambda_new - lambda_old) matches the
        // stationarity residual of the augmented dual
        {
            arma::vec aX = rel.apply_equalities(X);
            arma::vec aG = rel.apply_equalities(G);
            arma::vec rhs = (aX - rel.b) / sigma - aG + gram * dp.lambda;
            arma::vec lambda_new = chol_solve(R, rhs);
            G += rel.adjoint_equalities(lambda_new - dp.lambda);
            dp.lambda = lambda_new;
        }

        // cut multipliers, clamped coordinate descent
        for (int pass = 0; pass < params.t_passes && mc > 0; ++pass) {
            for (int c = 0; c < mc; ++c) {
                double num = sparse_dot(c, X) - sigma * sparse_dot(c, G);
                double t_new = std::max(0.0, dp.t(c) + num / (sigma * cut_nsq(c)));
                double delta = t_new - dp.t(c);
                if (delta != 0.0) {
                    for (const auto& [r, col, v] : cut_mat[c]) G(r, col) += delta * v;
                    dp.t(c) = t_new;
                }
            }
        }

        // nonnegativity multiplier
        {
            arma::mat target = G + dp.Q - X / sigma;
            arma::mat Q_new = arma::clamp(target, 0.0, arma::datum::inf);
            G += dp.Q - Q_new;
            dp.Q = Q_new;
        }

        // PSD slack and primal step: S = PSD part of M, X = -sigma * (negative part)
        {
            arma::mat M = symmetrize(G + dp.S - X / sigma);
            EigResult eig = sym_eig(M);
            arma::vec pos = arma::clamp(eig.values, 0.0, arma::datum::inf);
            arma::mat S_new = eig.vectors * arma::diagmat(pos) * eig.vectors.t();
            S_new = symmetrize(S_new);
            G += dp.S - S_new;
            dp.S = S_new;
            X = sigma * symmetrize(S_new - M);
        }

        // KKT residuals
        double p_eq = arma::norm(rel.apply_equalities(X) - rel.b) / (1.0 + norm_b);
        double p_cut = 0.0;
        if (mc > 0) {
            arma::vec cv = rel.cut_values(X);
            p_cut = arma::norm(arma::clamp(cv, 0.0, arma::datum::inf)) / (1.0 + norm_b);
        }
        double p_neg = arma::norm(arma::clamp(X, -arma::datum::inf, 0.0), "fro") /
                       (1.0 + arma::norm(X, "fro"));
        double d_res = arma::norm(G, "fro") / (1.0 + norm_w);
        double pobj = arma::dot(rel.W.as_col(), X.as_col());
        double dobj = arma::dot(rel.b, dp.lambda);
        double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        err = std::max({p_eq, p_cut, p_neg, d_res, gap});
        if (err <= params.tol) {
            converged = true;
            break;
        }

        if (iter % 50 == 0) {
            double p_err = std::max({p_eq, p_cut, p_neg});
            if (d_res > 10.0 * p_err)
                sigma = std::min(sigma * 1.5, 1e8);
            else if (p_err > 10.0 * d_res)
                sigma = std::max(sigma / 1.5, 1e-8);
        }
    }
    if (iter > params.max_iter) iter = params.max_iter;

    if (warm) {
        warm->valid = true;
        warm->X = X;
        warm->Q = dp.Q;
        warm->S = dp.S;
        warm->lambda = dp.lambda;
        warm->sigma = sigma;
        warm->t_by_cut.clear();
        for (int c = 0; c < mc; ++c) warm->t_by_cut.emplace_back(rel.cuts.cuts[c], dp.t(c));
    }

    DnnResult out;
    out.dual = unpack_dual(rel, dp);
    out.converged = converged;
    out.iterations = iter;
    out.kkt_residual = err;
    out.primal_obj = arma::dot(rel.W.as_col(), X.as_col());

    // pull the iterate into the DNN cone before handing it to rounding/branching
    arma::mat Z = symmetrize(X);
    for (int round = 0; round < 5; ++round)
        Z = project_psd(arma::clamp(Z, 0.0, arma::datum::inf));
    Z = arma::clamp(Z, 0.0, arma::datum::inf);
    out.Z = Z;
    return out;
}

double safe_upper_bound(const DualEstimate& dual, const DnnRelaxation& rel) {
    const int nb = rel.n_bar(), mb = rel.m_bar();
    if (static_cast<int>(dual.y_u.n_elem) != nb || static_cast<int>(dual.y_v.n_elem) != mb ||
        dual.tau_u.n_elem != rel.op_u.cl.size() || dual.tau_v.n_elem != rel.op_v.cl.size())
        throw std::invalid_argument("safe_upper_bound: multiplier dimensions mismatch");
    int p = 0, q = 0;
    for (const Cut& c : rel.cuts.cuts) (c.side == 'U' ? p : q)++;
    if (static_cast<int>(dual.t_u.n_elem) != p || static_cast<int>(dual.t_v.n_elem) != q)
        throw std::invalid_argument("safe_upper_bound: cut multiplier count mismatch");
    if ((dual.t_u.n_elem && dual.t_u.min() < -1e-12) ||
        (dual.t_v.n_elem && dual.t_v.min() < -1e-12))
        throw std::invalid_argument("safe_upper_bound: negative cut multiplier");
    if (dual.Q.n_elem && dual.Q.min() < -1e-12)
        throw std::invalid_argument("safe_upper_bound: negative entry in Q");

    arma::vec lambda(rel.b.n_elem);
    lambda.head(rel.op_u.count()) =
        arma::join_cols(dual.y_u, arma::vec{dual.alpha_u}, dual.tau_u);
    lambda.tail(rel.op_v.count()) =
        arma::join_cols(dual.y_v, arma::vec{dual.alpha_v}, dual.tau_v);

    arma::vec t(rel.cuts.size());
    int ip = 0, iq = 0;
    for (int c = 0; c < rel.cuts.size(); ++c)
        t(c) = rel.cuts.cuts[c].side == 'U' ? dual.t_u(ip++) : dual.t_v(iq++);

    arma::mat slack = rel.adjoint_equalities(lambda) + rel.adjoint_cuts(t) - rel.W;
    if (dual.Q.n_elem) slack -= dual.Q;

    double dval = arma::accu(dual.y_u) + arma::accu(dual.y_v) +
                  rel.agg.k * (dual.alpha_u + dual.alpha_v);
    EigResult eig = sym_eig(slack);
    double neg_sum = 0.0;
    for (double v : eig.values)
        if (v < 0) neg_sum += v;
    return dval - rel.d_min * neg_sum;
}

CuttingPlaneResult cutting_plane_bound(const AggregatedInstance& agg, const CutPool& initial,
                                       const CuttingPlaneParams& params) {
    CuttingPlaneResult out;
    out.ub = arma::datum::inf;
    CutPool pool = initial;
    DnnWarmStart warm;
    double prev_ub = arma::datum::inf;

    for (int round = 0; round < params.max_rounds; ++round) {
        DnnRelaxation rel = DnnRelaxation::build(agg, pool);
        DnnParams dp;
        dp.tol = params.sdp_tol;
        dp.max_iter = params.max_iter;
        DnnResult res = solve_dnn(rel, dp, &warm);
        if (!res.converged) out.all_converged = false;

        double ub = safe_upper_bound(res.dual, rel);
        out.ub_history.push_back(ub);
        out.ub = std::min(out.ub, ub);
        out.Z = res.Z;
        out.rounds = round + 1;

        pool = purge_inactive(pool, res.Z, agg.n_bar(), params.slack_tol);
        std::vector<Cut> fresh =
            separate_cuts(res.Z, agg, pool, params.max_separate, params.max_add,
                          derive_seed(params.seed, 1000 + round), params.viol_tol);
        if (fresh.empty()) break;
        bool improved_enough =
            round == 0 ||
            (prev_ub - ub) / std::max(1.0, std::abs(prev_ub)) > params.stop_rel;
        if (!improved_enough) break;
        prev_ub = ub;
        for (const Cut& c : fresh) pool.add(c);
    }
    out.pool = pool;
    return out;
}

} // namespace cbicl
