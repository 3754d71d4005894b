#include "cbicl/lowrank.h"

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "cbicl/linalg.h"
#include "cbicl/rng.h"
#include "cbicl/rounding.h"

namespace cbicl {

int choose_rank(int constraint_count, int k, int n_bar, int m_bar) {
    int r = 1;
    while (static_cast<long long>(r) * (r + 1) / 2 <= constraint_count) ++r;
    r = std::max(r, k);
    r = std::min(r, std::min(n_bar, m_bar));
    return r;
}

double eval_aug_lagrangian(const FactorPair& f, const AlmState& s, const SideOperator& op_u,
                           const SideOperator& op_v, const arma::mat& a_bar) {
    arma::vec r_u = op_u.apply_gram(f.z_u) - op_u.rhs();
    arma::vec r_v = op_v.apply_gram(f.z_v) - op_v.rhs();
    double data = arma::accu((a_bar * f.z_v) % f.z_u); // <a_bar, Z_U Z_V^T>
    return -data + arma::dot(s.lambda_u, r_u) + arma::dot(s.lambda_v, r_v) +
           0.5 * s.beta * (arma::dot(r_u, r_u) + arma::dot(r_v, r_v));
}

std::pair<arma::mat, arma::mat> grad_aug_lagrangian(const FactorPair& f, const AlmState& s,
                                                    const SideOperator& op_u,
                                                    const SideOperator& op_v,
                                                    const arma::mat& a_bar) {
    arma::vec r_u = op_u.apply_gram(f.z_u) - op_u.rhs();
    arma::vec r_v = op_v.apply_gram(f.z_v) - op_v.rhs();
    arma::mat g_u =
        2.0 * op_u.apply_adjoint_times(s.lambda_u + s.beta * r_u, f.z_u) - a_bar * f.z_v;
    arma::mat g_v =
        2.0 * op_v.apply_adjoint_times(s.lambda_v + s.beta * r_v, f.z_v) - a_bar.t() * f.z_u;
    return {std::move(g_u), std::move(g_v)};
}

double bb_steplength(const std::vector<std::pair<arma::vec, arma::vec>>& history, int k,
                     int m_alpha, double tau_alpha) {
    if (k == 0 || history.empty()) return 1.0;
    auto clamp_step = [](double a) {
        if (!std::isfinite(a) || a < 1e-10) return 1e-10;
        return std::min(a, 1e10);
    };
    auto bb_pair = [&](const std::pair<arma::vec, arma::vec>& sz) {
        double ss = arma::dot(sz.first, sz.first);
        double sy = arma::dot(sz.first, sz.second);
        double yy = arma::dot(sz.second, sz.second);
        double bb1 = sy != 0.0 ? ss / sy : std::numeric_limits<double>::infinity();
        double bb2 = yy != 0.0 ? sy / yy : std::numeric_limits<double>::infinity();
        return std::make_pair(bb1, bb2);
    };
    auto [bb1, bb2] = bb_pair(history.back());
    if (arma::dot(history.back().first, history.back().second) <= 0.0) return clamp_step(bb1);
    if (bb2 / bb1 < tau_alpha) {
        double best = bb2;
        int have = static_cast<int>(history.size());
        for (int back = 2; back <= m_alpha && back <= have; ++back)
            best = std::min(best, bb_pair(history[have - back]).second);
        return clamp_step(best);
    }
    return clamp_step(bb1);
}

namespace {

// projected gradient descent on one block with BB steps and Armijo backtracking
template <typename LossFn, typename GradFn>
long pg_block(arma::mat& Z, double eps, const SubproblemParams& p, LossFn loss, GradFn grad) {
    std::vector<std::pair<arma::vec, arma::vec>> history;
    arma::mat g = grad(Z);
    long iters = 0;
    int tiny_steps = 0;
    for (int k = 0; k < p.max_inner; ++k) {
        // Exit on the unit-step projected-gradient norm: the BB steplength can
        // dwarf or inflate ||D(alpha)|| arbitrarily near a stationary point,
        // while the outer method's step-1 conditions are stated at unit step.
        if (arma::norm(arma::clamp(Z - g, 0.0, 1.0) - Z, "fro") <= eps) break;
        double alpha = bb_steplength(history, k, p.m_alpha, p.tau_alpha);
        arma::mat D = arma::clamp(Z - alpha * g, 0.0, 1.0) - Z;
        if (arma::norm(D, "fro") <= eps * std::min(1.0, alpha)) break;
        double L0 = loss(Z);
        double slope = arma::dot(g.as_col(), D.as_col());
        double lam = 1.0;
        int backtracks = 0;
        while (loss(Z + lam * D) > L0 + p.sigma * lam * slope && backtracks < 60) {
            lam *= p.theta;
            ++backtracks;
        }
        if (backtracks >= 60 && loss(Z + lam * D) > L0) break; // no descent available
        arma::mat step = lam * D;
        if (arma::norm(step, "fro") <= 1e-14 * (1.0 + arma::norm(Z, "fro"))) {
            if (++tiny_steps >= 2) break;
        } else {
            tiny_steps = 0;
        }
        Z += step;
        arma::mat g_new = grad(Z);
        history.emplace_back(step.as_col(), (g_new - g).as_col());
        if (static_cast<int>(history.size()) > p.m_alpha + 1)
            history.erase(history.begin());
        g = std::move(g_new);
        ++iters;
    }
    return iters;
}

} // namespace

FactorPair solve_subproblem(FactorPair f, const AlmState& s, const SideOperator& op_u,
                            const SideOperator& op_v, const arma::mat& a_bar, double eps,
                            const SubproblemParams& params, SubproblemStats* stats) {
    SubproblemStats local;
    auto unit_pg_norms = [&](const FactorPair& fp) {
        auto [g_u, g_v] = grad_aug_lagrangian(fp, s, op_u, op_v, a_bar);
        double nu = arma::norm(arma::clamp(fp.z_u - g_u, 0.0, 1.0) - fp.z_u, "fro");
        double nv = arma::norm(arma::clamp(fp.z_v - g_v, 0.0, 1.0) - fp.z_v, "fro");
        return std::max(nu, nv);
    };

    for (int t = 0; t < params.max_outer; ++t) {
        local.outer_iters = t + 1;
        arma::mat zu_prev = f.z_u, zv_prev = f.z_v;

        local.inner_iters += pg_block(
            f.z_u, eps, params,
            [&](const arma::mat& Z) {
                FactorPair tmp{Z, f.z_v, f.r};
                return eval_aug_lagrangian(tmp, s, op_u, op_v, a_bar);
            },
            [&](const arma::mat& Z) {
                FactorPair tmp{Z, f.z_v, f.r};
                return grad_aug_lagrangian(tmp, s, op_u, op_v, a_bar).first;
            });

        local.inner_iters += pg_block(
            f.z_v, eps, params,
            [&](const arma::mat& Z) {
                FactorPair tmp{f.z_u, Z, f.r};
                return eval_aug_lagrangian(tmp, s, op_u, op_v, a_bar);
            },
            [&](const arma::mat& Z) {
                FactorPair tmp{f.z_u, Z, f.r};
                return grad_aug_lagrangian(tmp, s, op_u, op_v, a_bar).second;
            });

        double change = std::max(arma::norm(f.z_u - zu_prev, "fro"),
                                 arma::norm(f.z_v - zv_prev, "fro"));
        if (change <= eps) {
            // the returned point must satisfy the step-1 projected-gradient
            // conditions of the outer method, which are unit-step
            if (unit_pg_norms(f) <= eps) {
                local.converged = true;
                break;
            }
            if (change <= eps * 1e-6) break; // no further progress available
        }
    }
    if (stats) *stats = local;
    return f;
}

arma::mat lift_factors(const FactorPair& f) {
    arma::mat stacked = arma::join_cols(f.z_u, f.z_v);
    return stacked * stacked.t();
}

AlmResult alm_solve(const AggregatedInstance& agg, int k, std::uint64_t seed,
                    const AlmParams& params) {
    SideOperator op_u(agg.e_u, k, agg.cl_u);
    SideOperator op_v(agg.e_v, k, agg.cl_v);
    const int c = op_u.count() + op_v.count();
    const int r = choose_rank(c, k, agg.n_bar(), agg.m_bar());

    AlmResult out;
    Rng rng(seed);
    FactorPair f;
    f.r = r;
    f.z_u.set_size(agg.n_bar(), r);
    f.z_v.set_size(agg.m_bar(), r);
    double scale = 1.0 / std::sqrt(static_cast<double>(r));
    for (auto& v : f.z_u) v = rng.u01() * scale;
    for (auto& v : f.z_v) v = rng.u01() * scale;

    AlmState s;
    s.beta = params.beta1;
    s.lambda_u.zeros(op_u.count());
    s.lambda_v.zeros(op_v.count());

    std::ostringstream log;
    double prev_max_residual = std::numeric_limits<double>::infinity();
    double best_residual = std::numeric_limits<double>::infinity();
    int stalled_iters = 0;
    for (int it = 1; it <= params.max_outer; ++it) {
        s.iteration = it;
        SubproblemStats sub;
        f = solve_subproblem(std::move(f), s, op_u, op_v, agg.a_bar, params.eps_alm,
                             params.sub, &sub);

        s.residual_u = op_u.apply_gram(f.z_u) - op_u.rhs();
        s.residual_v = op_v.apply_gram(f.z_v) - op_v.rhs();
        s.lambda_u += s.beta * s.residual_u;
        s.lambda_v += s.beta * s.residual_v;

        // stationarity with the updated multipliers equals the plain-Lagrangian
        // projected gradient, so evaluate it at beta-free multipliers
        AlmState plain = s;
        plain.beta = 0.0;
        auto [g_u, g_v] = grad_aug_lagrangian(f, plain, op_u, op_v, agg.a_bar);
        double stat_u = arma::norm(arma::clamp(f.z_u - g_u, 0.0, 1.0) - f.z_u, "fro");
        double stat_v = arma::norm(arma::clamp(f.z_v - g_v, 0.0, 1.0) - f.z_v, "fro");
        double res_u = arma::norm(s.residual_u);
        double res_v = arma::norm(s.residual_v);
        double total = std::max({res_u, res_v, stat_u, stat_v});
        out.final_residual = total;
        out.outer_iters = it;

        log << "iter=" << it << " beta=" << s.beta << " max_residual=" << std::max(res_u, res_v)
            << " stat_u=" << stat_u << " stat_v=" << stat_v
            << " sub_iters=" << sub.inner_iters << "\n";

        if (total <= params.eps_alm) {
            out.converged = true;
            break;
        }
        double max_residual = std::max(res_u, res_v);
        if (max_residual > params.tau * prev_max_residual)
            s.beta = std::min(s.beta * params.gamma, params.beta_cap);
        if (max_residual < best_residual - 1e-12) {
            best_residual = max_residual;
            stalled_iters = 0;
        } else if (s.beta >= params.beta_cap && ++stalled_iters >= params.stall_window) {
            break; // residual no longer improving at the penalty cap
        }
        prev_max_residual = max_residual;
    }

    out.factors = std::move(f);
    out.state = std::move(s);
    out.run_log = log.str();
    return out;
}

SolverResult heuristic_solve(const WeightMatrix& A, const PairwiseConstraints& con, int k,
                             const HeuristicParams& params) {
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();

    SolverResult result;
    result.ub = std::numeric_limits<double>::quiet_NaN();
    result.gap = std::numeric_limits<double>::quiet_NaN();

    AggregateOutcome pre = aggregate(A, con, k);
    if (!pre.ok()) {
        result.status = SolveStatus::Infeasible;
        result.infeasible = pre.infeasible;
        return result;
    }
    const AggregatedInstance& agg = *pre.agg;

    AlmParams alm = params.alm;
    alm.eps_alm = params.eps_alm;

    struct RestartOutcome {
        bool feasible = false;
        double objective = -std::numeric_limits<double>::infinity();
        std::optional<Biclustering> solution;
        std::string log;
    };
    std::vector<RestartOutcome> outcomes(params.restarts);

    auto run_restart = [&](int idx) {
        std::uint64_t seed = derive_seed(params.seed, static_cast<std::uint64_t>(idx));
        AlmResult res = alm_solve(agg, k, seed, alm);
        RoundResult rounded = round_solution(lift_factors(res.factors), agg, A, con, seed);
        RestartOutcome& slot = outcomes[idx];
        std::ostringstream log;
        log << "restart=" << idx << " alm_converged=" << (res.converged ? 1 : 0)
            << " alm_iters=" << res.outer_iters << " residual=" << res.final_residual << "\n"
            << res.run_log;
        if (rounded.feasible()) {
            slot.feasible = true;
            slot.objective = rounded.objective;
            slot.solution = rounded.solution;
            log << "restart=" << idx << " objective=" << rounded.objective << "\n";
        } else {
            log << "restart=" << idx << " objective=infeasible\n";
        }
        slot.log = log.str();
    };

    int threads = std::max(1, params.threads);
    if (threads == 1) {
        for (int s = 0; s < params.restarts; ++s) run_restart(s);
    } else {
        std::vector<std::thread> workers;
        std::atomic<int> next{0};
        for (int w = 0; w < std::min(threads, params.restarts); ++w)
            workers.emplace_back([&] {
                while (true) {
                    int idx = next.fetch_add(1);
                    if (idx >= params.restarts) return;
                    run_restart(idx);
                }
            });
        for (auto& th : workers) th.join();
    }

    std::ostringstream log;
    int best_idx = -1;
    for (int s = 0; s < params.restarts; ++s) {
        log << outcomes[s].log;
        if (outcomes[s].feasible &&
            (best_idx < 0 || outcomes[s].objective > outcomes[best_idx].objective))
            best_idx = s;
    }
    result.event_log = log.str();
    result.wall_time_s = std::chrono::duration<double>(clock::now() - t_start).count();
    if (best_idx < 0) {
        result.status = SolveStatus::Infeasible;
        InfeasibleReport rep;
        rep.reason = "every restart failed to produce a feasible biclustering";
        result.infeasible = rep;
        return result;
    }
    result.best = outcomes[best_idx].solution;
    result.lb = outcomes[best_idx].objective;
    result.nodes = 0;
    return result;
}

} // namespace cbicl
