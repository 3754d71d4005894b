#include "cbicl/branch_and_cut.h"

#include <chrono>
#include <cmath>
#include <deque>
#include <sstream>

#include "cbicl/lap.h"
#include "cbicl/rng.h"
#include "cbicl/rounding.h"

namespace cbicl {

BranchPair select_branching_pair(const arma::mat& Z, const AggregatedInstance& agg) {
    BranchPair best;
    best.score = 1e-6; // below this every pair is effectively decided
    auto scan_side = [&](char side, int d, int offset) {
        const auto& cl = side == 'U' ? agg.cl_u : agg.cl_v;
        for (int i = 1; i <= d; ++i) {
            for (int j = 1; j <= d; ++j) {
                if (i == j) continue;
                if (cl.count(make_pair_canonical(i, j))) continue;
                double zij = Z(offset + i - 1, offset + j - 1);
                double zii = Z(offset + i - 1, offset + i - 1);
                double score = d * std::min(zij, zii - zij);
                if (score > best.score) {
                    best.found = true;
                    best.side = side;
                    best.i = i;
                    best.j = j;
                    best.score = score;
                }
            }
        }
    };
    scan_side('U', agg.n_bar(), 0);
    scan_side('V', agg.m_bar(), agg.n_bar());
    return best;
}

namespace {

struct BcNode {
    AggregatedInstance agg;
    CutPool cuts;
    double parent_ub = std::numeric_limits<double>::infinity();
    int depth = 0;
    long id = 0;
    std::uint64_t seed = 0;
    std::vector<std::tuple<char, int, int>> branch_ml, branch_cl;
};

// exact value of a node whose two sides both collapsed to k components:
// the assignment of components to clusters is a bijection, so only the
// pairing of row and column components remains
double solve_assignment_node(const BcNode& node, const WeightMatrix& A,
                             const PairwiseConstraints& con, Biclustering& out) {
    const int k = node.agg.k;
    arma::mat w(k, k);
    for (int g = 0; g < k; ++g)
        for (int h = 0; h < k; ++h)
            w(g, h) = node.agg.a_bar(g, h) / std::sqrt(node.agg.e_u(g) * node.agg.e_v(h));
    std::vector<int> perm = solve_lap_max(w);
    std::vector<int> rows_bar(k), cols_bar(k);
    for (int g = 0; g < k; ++g) rows_bar[g] = g + 1;
    std::vector<int> new_label(k + 1, 0);
    for (int g = 0; g < k; ++g) new_label[perm[g] + 1] = g + 1;
    for (int h = 0; h < k; ++h) cols_bar[h] = new_label[h + 1];
    Biclustering sol_bar(k, std::move(rows_bar), std::move(cols_bar));
    out = expand(node.agg, sol_bar);
    out.validate();
    if (!check_feasible(out, con))
        throw std::logic_error("assignment node produced an infeasible solution");
    return total_density(A, out);
}

} // namespace

SolverResult solve_exact(const WeightMatrix& A, const PairwiseConstraints& con, int k,
                         const ExactParams& params) {
    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();
    auto elapsed_s = [&] {
        return std::chrono::duration<double>(clock::now() - t_start).count();
    };
    auto out_of_time = [&] {
        return params.time_limit_s > 0 && elapsed_s() > params.time_limit_s;
    };

    SolverResult result;
    std::ostringstream log;

    AggregateOutcome pre = aggregate(A, con, k);
    if (!pre.ok()) {
        result.status = SolveStatus::Infeasible;
        result.infeasible = pre.infeasible;
        result.wall_time_s = elapsed_s();
        return result;
    }

    const double inf = std::numeric_limits<double>::infinity();
    double lb = -inf;
    double closed_ub_max = -inf; // fathomed subtrees still cap the final bound
    std::optional<Biclustering> incumbent;

    // best-first: highest inherited bound first, insertion order breaking ties
    std::deque<BcNode> open;
    long next_id = 1;
    {
        BcNode root;
        root.agg = *pre.agg;
        root.parent_ub = inf;
        root.depth = 0;
        root.id = next_id++;
        root.seed = params.seed;
        open.push_back(std::move(root));
    }
    auto pop_best = [&]() {
        size_t best_idx = 0;
        for (size_t i = 1; i < open.size(); ++i)
            if (open[i].parent_ub > open[best_idx].parent_ub) best_idx = i;
        BcNode node = std::move(open[best_idx]);
        open.erase(open.begin() + static_cast<long>(best_idx));
        return node;
    };
    auto open_ub = [&] {
        double ub = -inf;
        for (const auto& node : open) ub = std::max(ub, node.parent_ub);
        return ub;
    };

    bool hit_time_limit = false;
    while (!open.empty()) {
        if (out_of_time()) {
            hit_time_limit = true;
            break;
        }
        if (result.nodes >= params.max_nodes) break;
        BcNode node = pop_best();
        result.nodes++;

        NodeAudit audit;
        audit.id = node.id;
        audit.depth = node.depth;
        audit.branch_ml = node.branch_ml;
        audit.branch_cl = node.branch_cl;

        double node_ub;
        int cuts_added = 0, rounds = 0;
        std::string branch_desc = "none";

        if (node.agg.n_bar() == k && node.agg.m_bar() == k) {
            Biclustering sol;
            double value = solve_assignment_node(node, A, con, sol);
            node_ub = std::min(value, node.parent_ub);
            if (value > lb) {
                lb = value;
                incumbent = sol;
            }
            closed_ub_max = std::max(closed_ub_max, node_ub);
            log << "node=" << node.id << " depth=" << node.depth << " ub=" << node_ub
                << " lb=" << lb << " cuts_added=0 rounds=0 branch=none\n";
            result.audits.push_back(std::move(audit));
            if (node.id == 1) {
                result.root_gap = 0.0;
                result.root_cut_rounds = 0;
            }
        } else {
            CuttingPlaneParams cp;
            cp.sdp_tol = params.sdp_tol;
            cp.stop_rel = params.cp_stop_rel;
            cp.max_rounds = params.cp_max_rounds;
            cp.max_separate = params.max_separate;
            cp.max_add = params.max_add;
            cp.max_iter = params.admm_max_iter;
            cp.seed = node.seed;
            CuttingPlaneResult bound = cutting_plane_bound(node.agg, node.cuts, cp);
            audit.safe_ubs = bound.ub_history;
            rounds = bound.rounds;
            cuts_added = bound.pool.size();
            node_ub = std::min(bound.ub, node.parent_ub);

            RoundResult rounded = round_solution(bound.Z, node.agg, A, con, node.seed);
            if (!rounded.feasible()) {
                // the repair ILP proved the cannot-link structure of this node
                // admits no k-clustering; the whole subtree is infeasible
                log << "node=" << node.id << " depth=" << node.depth << " ub=" << node_ub
                    << " lb=" << lb << " cuts_added=" << cuts_added << " rounds=" << rounds
                    << " branch=infeasible\n";
                result.audits.push_back(std::move(audit));
                if (node.id == 1) {
                    result.root_gap = 0.0;
                    result.root_cut_rounds = rounds;
                }
                continue;
            }
            if (rounded.objective > node_ub + 1e-6 * (1.0 + std::abs(node_ub)))
                throw std::logic_error("rounded objective exceeds the certified node bound");
            if (rounded.objective > lb) {
                lb = rounded.objective;
                incumbent = rounded.solution;
            }
            if (node.id == 1) {
                result.root_cut_rounds = rounds;
                result.root_gap =
                    node_ub != 0 ? (node_ub - lb) / std::abs(node_ub) : 0.0;
            }

            bool pruned = node_ub <= lb * (1.0 + params.gap_tol);
            if (pruned) {
                closed_ub_max = std::max(closed_ub_max, node_ub);
                branch_desc = "pruned";
            } else {
                BranchPair pair = select_branching_pair(bound.Z, node.agg);
                if (!pair.found) {
                    closed_ub_max = std::max(closed_ub_max, node_ub);
                    branch_desc = "leaf";
                } else {
                    branch_desc = std::string(1, pair.side) + ":" + std::to_string(pair.i) +
                                  "," + std::to_string(pair.j);
                    const auto& comps =
                        pair.side == 'U' ? node.agg.comp_u : node.agg.comp_v;
                    int orig_i = comps[pair.i - 1].front();
                    int orig_j = comps[pair.j - 1].front();

                    BcNode ml_child;
                    MergeResult merged = merge_components(node.agg, pair.side, pair.i, pair.j);
                    ml_child.agg = std::move(merged.agg);
                    ml_child.cuts = remap_cuts(node.cuts, pair.side, merged.remap);
                    ml_child.parent_ub = node_ub;
                    ml_child.depth = node.depth + 1;
                    ml_child.id = next_id++;
                    ml_child.seed = derive_seed(node.seed, 1);
                    ml_child.branch_ml = node.branch_ml;
                    ml_child.branch_cl = node.branch_cl;
                    ml_child.branch_ml.emplace_back(pair.side, orig_i, orig_j);

                    BcNode cl_child;
                    cl_child.agg = node.agg;
                    (pair.side == 'U' ? cl_child.agg.cl_u : cl_child.agg.cl_v)
                        .insert(make_pair_canonical(pair.i, pair.j));
                    cl_child.cuts = node.cuts;
                    cl_child.parent_ub = node_ub;
                    cl_child.depth = node.depth + 1;
                    cl_child.id = next_id++;
                    cl_child.seed = derive_seed(node.seed, 2);
                    cl_child.branch_ml = node.branch_ml;
                    cl_child.branch_cl = node.branch_cl;
                    cl_child.branch_cl.emplace_back(pair.side, orig_i, orig_j);

                    open.push_back(std::move(ml_child));
                    open.push_back(std::move(cl_child));
                }
            }
            log << "node=" << node.id << " depth=" << node.depth << " ub=" << node_ub
                << " lb=" << lb << " cuts_added=" << cuts_added << " rounds=" << rounds
                << " branch=" << branch_desc << "\n";
            result.audits.push_back(std::move(audit));
        }

        // global convergence check
        double ub_now = std::max({lb, closed_ub_max, open_ub()});
        if (std::isfinite(ub_now) && ub_now != 0 && lb > -inf &&
            (ub_now - lb) / std::abs(ub_now) <= params.gap_tol)
            break;
    }

    double final_ub = std::max(lb, closed_ub_max);
    if (!open.empty()) final_ub = std::max(final_ub, open_ub());

    result.status = hit_time_limit ? SolveStatus::TimeLimit : SolveStatus::Solved;
    if (!incumbent) {
        if (!hit_time_limit) {
            // every subtree turned out infeasible
            result.status = SolveStatus::Infeasible;
            InfeasibleReport rep;
            rep.reason = "no feasible biclustering satisfies the constraints";
            result.infeasible = rep;
        }
        result.wall_time_s = elapsed_s();
        result.event_log = log.str();
        return result;
    }
    result.best = incumbent;
    result.lb = lb;
    result.ub = final_ub;
    result.gap = final_ub != 0 ? (final_ub - lb) / std::abs(final_ub) : 0.0;
    result.wall_time_s = elapsed_s();
    result.event_log = log.str();
    return result;
}

} // namespace cbicl
