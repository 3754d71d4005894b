#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "cbicl/types.h"

namespace cbicl {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// One biclustering problem: weights, pairwise constraints and the target k.
struct Instance {
    WeightMatrix A;
    PairwiseConstraints con;
    int k = 0;
};

// CBICL text format, version 1. Round-trip identity: parse(serialize(x)) == x.
Instance parse_instance(const std::string& text);
std::string serialize_instance(const Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

/// SOLUTION file: objective value plus the row/column labels.
struct SolutionFile {
    double objective = 0.0;
    std::vector<int> row_labels;
    std::vector<int> col_labels;
};

SolutionFile parse_solution(const std::string& text);
std::string serialize_solution(const SolutionFile& sol);
SolutionFile load_solution(const std::string& path);
void save_solution(const SolutionFile& sol, const std::string& path);

/// TRUTH sidecar emitted by the generator (ground-truth labels).
struct TruthFile {
    std::vector<int> row_labels;
    std::vector<int> col_labels;
};

TruthFile parse_truth(const std::string& text);
std::string serialize_truth(const TruthFile& truth);
TruthFile load_truth(const std::string& path);
void save_truth(const TruthFile& truth, const std::string& path);

// full-precision decimal rendering used by all writers
std::string format_double(double x);

} // namespace cbicl
