#include "cbicl/evalgen.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "cbicl/lap.h"
#include "cbicl/rng.h"

namespace cbicl {

PlantedInstance generate_planted(int n, int m, int k, double noise_sigma, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("generate_planted: k must be >= 2");
    if (n < k || m < k) throw std::invalid_argument("generate_planted: need n >= k and m >= k");

    auto even_labels = [](int count, int k_) {
        // contiguous groups, first (count % k) groups one element larger
        std::vector<int> labels(count);
        int base = count / k_, extra = count % k_;
        int pos = 0;
        for (int g = 0; g < k_; ++g) {
            int size = base + (g < extra ? 1 : 0);
            for (int t = 0; t < size; ++t) labels[pos++] = g + 1;
        }
        return labels;
    };

    PlantedInstance inst;
    inst.k = k;
    inst.noise_sigma = noise_sigma;
    inst.row_truth = even_labels(n, k);
    inst.col_truth = even_labels(m, k);

    Rng rng(seed);
    arma::mat A(n, m, arma::fill::zeros);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (inst.row_truth[i] == inst.col_truth[j]) A(i, j) = rng.u01();
    if (noise_sigma > 0.0)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) A(i, j) += noise_sigma * rng.normal();
    inst.A = WeightMatrix(std::move(A));
    return inst;
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

namespace {

// one side: fill (ml, cl) quotas from shuffled distinct pairs, then flip a
// ceil(violation_frac * total) subset
void sample_side(const std::vector<int>& truth, int ml_quota, int cl_quota,
                 double violation_frac, Rng& rng, std::set<IndexPair>& ml,
                 std::set<IndexPair>& cl) {
    const int n = static_cast<int>(truth.size());
    std::vector<IndexPair> pairs;
    pairs.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) pairs.emplace_back(i, j);
    // Fisher-Yates
    for (int i = static_cast<int>(pairs.size()) - 1; i > 0; --i)
        std::swap(pairs[i], pairs[rng.uniform_int(i + 1)]);

    std::vector<std::pair<IndexPair, bool>> sampled; // (pair, is_ml)
    int need_ml = ml_quota, need_cl = cl_quota;
    for (const auto& p : pairs) {
        if (need_ml == 0 && need_cl == 0) break;
        bool same = truth[p.first - 1] == truth[p.second - 1];
        if (same && need_ml > 0) {
            sampled.emplace_back(p, true);
            --need_ml;
        } else if (!same && need_cl > 0) {
            sampled.emplace_back(p, false);
            --need_cl;
        }
    }
    if (need_ml > 0 || need_cl > 0)
        throw std::invalid_argument("sample_constraints: quota exceeds available pairs");

    int total = ml_quota + cl_quota;
    int flips = static_cast<int>(std::ceil(violation_frac * total));
    flips = std::min(flips, total);
    if (flips > 0) {
        std::vector<int> order(sampled.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
            std::swap(order[i], order[rng.uniform_int(i + 1)]);
        for (int f = 0; f < flips; ++f) sampled[order[f]].second = !sampled[order[f]].second;
    }
    for (const auto& [p, is_ml] : sampled) (is_ml ? ml : cl).insert(p);
    for (const auto& p : ml)
        if (cl.count(p)) throw std::logic_error("sample_constraints: pair in both ML and CL");
}

} // namespace

PairwiseConstraints sample_constraints(const std::vector<int>& row_truth,
                                       const std::vector<int>& col_truth,
                                       const ConstraintQuotas& quotas, double violation_frac,
                                       std::uint64_t seed) {
    PairwiseConstraints con;
    Rng rng_u(derive_seed(seed, 0));
    Rng rng_v(derive_seed(seed, 1));
    if (quotas.ml_u + quotas.cl_u > 0)
        sample_side(row_truth, quotas.ml_u, quotas.cl_u, violation_frac, rng_u, con.ml_u,
                    con.cl_u);
    if (quotas.ml_v + quotas.cl_v > 0)
        sample_side(col_truth, quotas.ml_v, quotas.cl_v, violation_frac, rng_v, con.ml_v,
                    con.cl_v);
    return con;
}

namespace {

// contingency table between two labelings over compacted label ids
arma::Mat<long long> contingency(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("label sequences differ in length");
    std::map<int, int> ida, idb;
    for (int x : a) ida.emplace(x, 0);
    for (int x : b) idb.emplace(x, 0);
    int next = 0;
    for (auto& [key, val] : ida) val = next++;
    next = 0;
    for (auto& [key, val] : idb) val = next++;
    arma::Mat<long long> table(ida.size(), idb.size(), arma::fill::zeros);
    for (size_t i = 0; i < a.size(); ++i) table(ida[a[i]], idb[b[i]])++;
    return table;
}

double comb2(long long x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); }

} // namespace

double ari(const std::vector<int>& a, const std::vector<int>& b) {
    auto table = contingency(a, b);
    const long long n = static_cast<long long>(a.size());
    double sum_ij = 0.0;
    for (arma::uword r = 0; r < table.n_rows; ++r)
        for (arma::uword c = 0; c < table.n_cols; ++c) sum_ij += comb2(table(r, c));
    double sum_a = 0.0, sum_b = 0.0;
    for (arma::uword r = 0; r < table.n_rows; ++r) sum_a += comb2(arma::accu(table.row(r)));
    for (arma::uword c = 0; c < table.n_cols; ++c) sum_b += comb2(arma::accu(table.col(c)));
    double expected = sum_a * sum_b / comb2(n);
    double max_index = 0.5 * (sum_a + sum_b);
    double denom = max_index - expected;
    if (std::abs(denom) < 1e-15) return (sum_ij == max_index) ? 1.0 : 0.0;
    return (sum_ij - expected) / denom;
}

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
    auto table = contingency(a, b);
    const double n = static_cast<double>(a.size());
    double h_a = 0.0, h_b = 0.0, mi = 0.0;
    arma::vec pa(table.n_rows), pb(table.n_cols);
    for (arma::uword r = 0; r < table.n_rows; ++r) pa(r) = arma::accu(table.row(r)) / n;
    for (arma::uword c = 0; c < table.n_cols; ++c) pb(c) = arma::accu(table.col(c)) / n;
    for (arma::uword r = 0; r < table.n_rows; ++r)
        if (pa(r) > 0) h_a -= pa(r) * std::log(pa(r));
    for (arma::uword c = 0; c < table.n_cols; ++c)
        if (pb(c) > 0) h_b -= pb(c) * std::log(pb(c));
    for (arma::uword r = 0; r < table.n_rows; ++r)
        for (arma::uword c = 0; c < table.n_cols; ++c) {
            double pij = table(r, c) / n;
            if (pij > 0) mi += pij * std::log(pij / (pa(r) * pb(c)));
        }
    double mean_h = 0.5 * (h_a + h_b);
    if (mean_h < 1e-15) return 0.0; // single-cluster convention
    return mi / mean_h;
}

namespace {

// surjective labelings onto 1..k in restricted-growth form (canonical up to
// label permutation): first occurrences appear in increasing label order
void enumerate_rgs(int n, int k, std::vector<int>& current, int used,
                   std::vector<std::vector<int>>& out) {
    int pos = static_cast<int>(current.size());
    if (pos == n) {
        if (used == k) out.push_back(current);
        return;
    }
    if (used + (n - pos) < k) return; // cannot reach k labels
    for (int lab = 1; lab <= std::min(used + 1, k); ++lab) {
        current.push_back(lab);
        enumerate_rgs(n, k, current, std::max(used, lab), out);
        current.pop_back();
    }
}

// all surjective labelings (no dedup)
void enumerate_surjective(int n, int k, std::vector<int>& current,
                          std::vector<std::vector<int>>& out) {
    int pos = static_cast<int>(current.size());
    if (pos == n) {
        std::vector<bool> seen(k + 1, false);
        for (int lab : current) seen[lab] = true;
        for (int lab = 1; lab <= k; ++lab)
            if (!seen[lab]) return;
        out.push_back(current);
        return;
    }
    for (int lab = 1; lab <= k; ++lab) {
        current.push_back(lab);
        enumerate_surjective(n, k, current, out);
        current.pop_back();
    }
}

bool side_feasible(const std::vector<int>& labels, const std::set<IndexPair>& ml,
                   const std::set<IndexPair>& cl) {
    for (const auto& [i, j] : ml)
        if (labels[i - 1] != labels[j - 1]) return false;
    for (const auto& [i, j] : cl)
        if (labels[i - 1] == labels[j - 1]) return false;
    return true;
}

} // namespace

OracleResult brute_force_optimum(const WeightMatrix& A, const PairwiseConstraints& con, int k) {
    const int n = A.n(), m = A.m();
    if (n > 8 || m > 8) throw std::invalid_argument("brute_force_optimum: size guard n,m <= 8");
    if (k < 2) throw std::invalid_argument("brute_force_optimum: k must be >= 2");
    con.validate(n, m);

    OracleResult result;
    if (n < k || m < k) return result;

    std::vector<std::vector<int>> row_labelings, col_labelings;
    {
        std::vector<int> cur;
        enumerate_rgs(n, k, cur, 0, row_labelings);
    }
    {
        std::vector<int> cur;
        enumerate_surjective(m, k, cur, col_labelings);
    }

    std::vector<const std::vector<int>*> rows_ok, cols_ok;
    for (const auto& labels : row_labelings)
        if (side_feasible(labels, con.ml_u, con.cl_u)) rows_ok.push_back(&labels);
    for (const auto& labels : col_labelings)
        if (side_feasible(labels, con.ml_v, con.cl_v)) cols_ok.push_back(&labels);
    if (rows_ok.empty() || cols_ok.empty()) return result;

    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> best_rows, best_cols;
    arma::mat w(k, k);
    for (const auto* rows : rows_ok) {
        std::vector<int> size_u(k, 0);
        for (int lab : *rows) size_u[lab - 1]++;
        for (const auto* cols : cols_ok) {
            std::vector<int> size_v(k, 0);
            for (int lab : *cols) size_v[lab - 1]++;
            w.zeros();
            for (int i = 0; i < n; ++i) {
                int g = (*rows)[i] - 1;
                for (int j = 0; j < m; ++j) w(g, (*cols)[j] - 1) += A.A(i, j);
            }
            for (int g = 0; g < k; ++g)
                for (int h = 0; h < k; ++h)
                    w(g, h) /= std::sqrt(static_cast<double>(size_u[g]) * size_v[h]);
            std::vector<int> perm = solve_lap_max(w);
            double value = lap_value(w, perm);
            if (value > best + 1e-12) {
                best = value;
                best_rows = *rows;
                // relabel columns so that column-cluster perm[g] becomes g+1
                std::vector<int> new_label(k + 1, 0);
                for (int g = 0; g < k; ++g) new_label[perm[g] + 1] = g + 1;
                best_cols.resize(m);
                for (int j = 0; j < m; ++j) best_cols[j] = new_label[(*cols)[j]];
            }
        }
    }

    result.best = Biclustering(k, std::move(best_rows), std::move(best_cols));
    result.objective = best;
    return result;
}

} // namespace cbicl
