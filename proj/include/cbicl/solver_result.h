#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cbicl/aggregate.h"
#include "cbicl/types.h"

namespace cbicl {

enum class SolveStatus { Solved, TimeLimit, Infeasible };

/// One processed branch-and-cut node, kept for auditing: which branching
/// constraints defined it (as original-vertex pairs) and every safe upper
/// bound emitted while bounding it.
struct NodeAudit {
    long id = 0;
    int depth = 0;
    std::vector<std::tuple<char, int, int>> branch_ml; // (side, orig i, orig j)
    std::vector<std::tuple<char, int, int>> branch_cl;
    std::vector<double> safe_ubs;
};

struct SolverResult {
    SolveStatus status = SolveStatus::Solved;
    std::optional<Biclustering> best;
    double lb = 0.0;
    double ub = 0.0;      // NaN for the heuristic (no certificate)
    double gap = 0.0;     // (ub - lb) / ub, NaN for the heuristic
    long nodes = 0;
    double root_gap = 0.0;
    int root_cut_rounds = 0;
    double wall_time_s = 0.0;
    std::string event_log; // per-node lines (exact) or per-iteration lines (heuristic)
    std::vector<NodeAudit> audits;
    std::optional<InfeasibleReport> infeasible;
};

} // namespace cbicl
