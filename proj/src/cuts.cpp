#include "cbicl/cuts.h"

#include <algorithm>

#include "cbicl/rng.h"

namespace cbicl {

namespace {

inline int off(const Cut& c, int n_bar) { return c.side == 'U' ? 0 : n_bar; }

} // namespace

double cut_value(const Cut& c, const arma::mat& Z, int n_bar) {
    const int o = off(c, n_bar);
    const int i = o + c.i - 1, j = o + c.j - 1;
    if (c.kind == 'p') return Z(i, j) - Z(i, i);
    const int h = o + c.h - 1;
    return Z(i, j) + Z(i, h) - Z(i, i) - Z(j, h);
}

void add_cut_adjoint(const Cut& c, double weight, arma::mat& M, int n_bar) {
    const int o = off(c, n_bar);
    const int i = o + c.i - 1, j = o + c.j - 1;
    if (c.kind == 'p') {
        M(i, j) += 0.5 * weight;
        M(j, i) += 0.5 * weight;
        M(i, i) -= weight;
        return;
    }
    const int h = o + c.h - 1;
    M(i, j) += 0.5 * weight;
    M(j, i) += 0.5 * weight;
    M(i, h) += 0.5 * weight;
    M(h, i) += 0.5 * weight;
    M(i, i) -= weight;
    M(j, h) -= 0.5 * weight;
    M(h, j) -= 0.5 * weight;
}

double cut_norm_sq(const Cut& c) { return c.kind == 'p' ? 1.5 : 2.5; }

std::vector<std::tuple<int, int, double>> cut_entries(const Cut& c, int n_bar) {
    const int o = off(c, n_bar);
    const int i = o + c.i - 1, j = o + c.j - 1;
    std::vector<std::tuple<int, int, double>> out;
    if (c.kind == 'p') {
        out = {{i, j, 0.5}, {j, i, 0.5}, {i, i, -1.0}};
    } else {
        const int h = o + c.h - 1;
        out = {{i, j, 0.5}, {j, i, 0.5}, {i, h, 0.5}, {h, i, 0.5},
               {i, i, -1.0}, {j, h, -0.5}, {h, j, -0.5}};
    }
    return out;
}

namespace {

void collect_side(const arma::mat& Z, char side, int d, int n_bar, const CutPool& pool,
                  int max_separate, double viol_tol, Rng& rng,
                  std::vector<std::pair<double, Cut>>& found) {
    if (d < 2) return;
    const long long pair_count = static_cast<long long>(d) * (d - 1);
    const long long tri_count = d >= 3 ? static_cast<long long>(d) * (d - 1) * (d - 2) / 2 : 0;
    const long long total = pair_count + tri_count;

    auto consider = [&](const Cut& c) {
        double v = cut_value(c, Z, n_bar);
        if (v > viol_tol && !pool.contains(c)) found.emplace_back(v, c);
    };

    if (total <= max_separate) {
        for (int i = 1; i <= d; ++i)
            for (int j = 1; j <= d; ++j) {
                if (i == j) continue;
                consider(Cut{side, 'p', i, j, 0});
            }
        for (int i = 1; i <= d; ++i)
            for (int j = 1; j <= d; ++j) {
                if (j == i) continue;
                for (int h = j + 1; h <= d; ++h) {
                    if (h == i) continue;
                    consider(Cut{side, 't', i, j, h});
                }
            }
        return;
    }

    std::set<std::tuple<char, char, int, int, int>> seen;
    for (int draw = 0; draw < max_separate; ++draw) {
        bool want_pair = tri_count == 0 ||
                         static_cast<long long>(rng.next_u64() % static_cast<std::uint64_t>(total)) <
                             pair_count;
        Cut c;
        c.side = side;
        if (want_pair) {
            c.kind = 'p';
            c.i = 1 + rng.uniform_int(d);
            do {
                c.j = 1 + rng.uniform_int(d);
            } while (c.j == c.i);
        } else {
            c.kind = 't';
            c.i = 1 + rng.uniform_int(d);
            do {
                c.j = 1 + rng.uniform_int(d);
            } while (c.j == c.i);
            do {
                c.h = 1 + rng.uniform_int(d);
            } while (c.h == c.i || c.h == c.j);
            if (c.j > c.h) std::swap(c.j, c.h);
        }
        if (!seen.insert(c.key()).second) continue;
        consider(c);
    }
}

} // namespace

std::vector<Cut> separate_cuts(const arma::mat& Z, const AggregatedInstance& agg,
                               const CutPool& pool, int max_separate, int max_add,
                               std::uint64_t seed, double viol_tol) {
    std::vector<std::pair<double, Cut>> found;
    Rng rng(seed);
    collect_side(Z, 'U', agg.n_bar(), agg.n_bar(), pool, max_separate, viol_tol, rng, found);
    collect_side(Z, 'V', agg.m_bar(), agg.n_bar(), pool, max_separate, viol_tol, rng, found);
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<Cut> out;
    for (const auto& [v, c] : found) {
        if (static_cast<int>(out.size()) >= max_add) break;
        out.push_back(c);
    }
    return out;
}

CutPool purge_inactive(const CutPool& pool, const arma::mat& Z, int n_bar, double slack_tol) {
    CutPool kept;
    for (const Cut& c : pool.cuts) {
        double slack = -cut_value(c, Z, n_bar);
        if (slack <= slack_tol) kept.add(c);
    }
    return kept;
}

CutPool remap_cuts(const CutPool& pool, char side, const std::vector<int>& remap) {
    CutPool out;
    for (Cut c : pool.cuts) {
        if (c.side == side) {
            c.i = remap[c.i];
            c.j = remap[c.j];
            if (c.kind == 't') {
                c.h = remap[c.h];
                if (c.j > c.h) std::swap(c.j, c.h);
                if (c.i == c.j || c.i == c.h || c.j == c.h) continue; // collapsed
            } else {
                if (c.i == c.j) continue;
            }
        }
        out.add(c);
    }
    return out;
}

} // namespace cbicl
