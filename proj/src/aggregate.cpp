#include "cbicl/aggregate.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cbicl {

namespace {

// union-find over 0-based vertices
struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// components (1-based member lists) ordered by smallest contained original index
std::vector<std::vector<int>> components_from_ml(int n, const std::set<IndexPair>& ml) {
    DisjointSets ds(n);
    for (const auto& [i, j] : ml) ds.unite(i - 1, j - 1);
    std::vector<std::vector<int>> by_root(n);
    for (int v = 0; v < n; ++v) by_root[ds.find(v)].push_back(v + 1);
    std::vector<std::vector<int>> comps;
    for (int v = 0; v < n; ++v)
        if (!by_root[v].empty()) comps.push_back(std::move(by_root[v]));
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

std::vector<int> comp_index_of(const std::vector<std::vector<int>>& comps, int n) {
    std::vector<int> idx(n + 1, 0);
    for (size_t c = 0; c < comps.size(); ++c)
        for (int v : comps[c]) idx[v] = static_cast<int>(c) + 1;
    return idx;
}

// lift original cannot-link pairs to component pairs; a self-pair is an ML/CL conflict
std::optional<InfeasibleReport> project_cl(const std::set<IndexPair>& cl,
                                           const std::vector<int>& comp_of, char side,
                                           std::set<IndexPair>& out) {
    for (const auto& [i, j] : cl) {
        int ci = comp_of[i], cj = comp_of[j];
        if (ci == cj) {
            InfeasibleReport rep;
            rep.side = side;
            rep.witness = {i, j};
            rep.reason = std::string("cannot-link pair (") + std::to_string(i) + "," +
                         std::to_string(j) + ") on side " + side +
                         " joins vertices linked by must-link constraints";
            return rep;
        }
        out.insert(make_pair_canonical(ci, cj));
    }
    return std::nullopt;
}

} // namespace

int AggregatedInstance::comp_of_u(int orig) const {
    for (size_t c = 0; c < comp_u.size(); ++c)
        for (int v : comp_u[c])
            if (v == orig) return static_cast<int>(c) + 1;
    throw std::invalid_argument("original U index out of range");
}

int AggregatedInstance::comp_of_v(int orig) const {
    for (size_t c = 0; c < comp_v.size(); ++c)
        for (int v : comp_v[c])
            if (v == orig) return static_cast<int>(c) + 1;
    throw std::invalid_argument("original V index out of range");
}

arma::mat AggregatedInstance::t_u() const {
    int n = 0;
    for (const auto& comp : comp_u) n += static_cast<int>(comp.size());
    arma::mat T(comp_u.size(), n, arma::fill::zeros);
    for (size_t c = 0; c < comp_u.size(); ++c)
        for (int v : comp_u[c]) T(c, v - 1) = 1.0;
    return T;
}

arma::mat AggregatedInstance::t_v() const {
    int m = 0;
    for (const auto& comp : comp_v) m += static_cast<int>(comp.size());
    arma::mat T(comp_v.size(), m, arma::fill::zeros);
    for (size_t c = 0; c < comp_v.size(); ++c)
        for (int v : comp_v[c]) T(c, v - 1) = 1.0;
    return T;
}

AggregateOutcome aggregate(const WeightMatrix& A, const PairwiseConstraints& con, int k) {
    con.validate(A.n(), A.m());
    AggregateOutcome out;
    AggregatedInstance agg;
    agg.k = k;
    agg.comp_u = components_from_ml(A.n(), con.ml_u);
    agg.comp_v = components_from_ml(A.m(), con.ml_v);

    auto idx_u = comp_index_of(agg.comp_u, A.n());
    auto idx_v = comp_index_of(agg.comp_v, A.m());

    if (auto rep = project_cl(con.cl_u, idx_u, 'U', agg.cl_u)) {
        out.infeasible = rep;
        return out;
    }
    if (auto rep = project_cl(con.cl_v, idx_v, 'V', agg.cl_v)) {
        out.infeasible = rep;
        return out;
    }
    if (agg.n_bar() < k || agg.m_bar() < k) {
        InfeasibleReport rep;
        rep.reason = "fewer aggregated vertices than clusters: n_bar=" +
                     std::to_string(agg.n_bar()) + ", m_bar=" + std::to_string(agg.m_bar()) +
                     ", k=" + std::to_string(k);
        out.infeasible = rep;
        return out;
    }

    agg.e_u.set_size(agg.n_bar());
    for (int c = 0; c < agg.n_bar(); ++c) agg.e_u(c) = static_cast<double>(agg.comp_u[c].size());
    agg.e_v.set_size(agg.m_bar());
    for (int c = 0; c < agg.m_bar(); ++c) agg.e_v(c) = static_cast<double>(agg.comp_v[c].size());

    agg.a_bar.zeros(agg.n_bar(), agg.m_bar());
    for (int i = 0; i < A.n(); ++i)
        for (int j = 0; j < A.m(); ++j) agg.a_bar(idx_u[i + 1] - 1, idx_v[j + 1] - 1) += A.A(i, j);

    out.agg = std::move(agg);
    return out;
}

Biclustering expand(const AggregatedInstance& agg, const Biclustering& sol_bar) {
    if (static_cast<int>(sol_bar.row_labels.size()) != agg.n_bar() ||
        static_cast<int>(sol_bar.col_labels.size()) != agg.m_bar())
        throw std::invalid_argument("aggregated solution dimensions mismatch");
    int n = 0, m = 0;
    for (const auto& comp : agg.comp_u) n += static_cast<int>(comp.size());
    for (const auto& comp : agg.comp_v) m += static_cast<int>(comp.size());
    std::vector<int> rows(n, 0), cols(m, 0);
    for (int c = 0; c < agg.n_bar(); ++c)
        for (int v : agg.comp_u[c]) rows[v - 1] = sol_bar.row_labels[c];
    for (int c = 0; c < agg.m_bar(); ++c)
        for (int v : agg.comp_v[c]) cols[v - 1] = sol_bar.col_labels[c];
    return Biclustering(sol_bar.k, std::move(rows), std::move(cols));
}

MergeResult merge_components(const AggregatedInstance& agg, char side, int i, int j) {
    if (side != 'U' && side != 'V') throw std::invalid_argument("side must be 'U' or 'V'");
    const bool on_u = (side == 'U');
    const int count = on_u ? agg.n_bar() : agg.m_bar();
    if (i == j || i < 1 || j < 1 || i > count || j > count)
        throw std::invalid_argument("invalid component pair to merge");
    const auto& cl = on_u ? agg.cl_u : agg.cl_v;
    if (cl.count(make_pair_canonical(i, j)))
        throw std::invalid_argument("cannot merge a projected cannot-link pair");

    const auto& comps = on_u ? agg.comp_u : agg.comp_v;
    std::vector<std::vector<int>> merged;
    merged.reserve(comps.size() - 1);
    std::vector<int> owner(count + 1, 0); // old index -> position in merged (0-based)
    {
        std::vector<int> member_of(count + 1);
        for (int c = 1; c <= count; ++c) member_of[c] = c;
        member_of[std::max(i, j)] = std::min(i, j);
        // collect groups keyed by representative, then order by smallest original index
        std::vector<std::vector<int>> groups(count + 1);
        for (int c = 1; c <= count; ++c) groups[member_of[c]].push_back(c);
        std::vector<std::pair<int, std::vector<int>>> keyed;
        for (int c = 1; c <= count; ++c) {
            if (groups[c].empty()) continue;
            std::vector<int> members;
            for (int old : groups[c])
                members.insert(members.end(), comps[old - 1].begin(), comps[old - 1].end());
            std::sort(members.begin(), members.end());
            keyed.emplace_back(members.front(), std::move(members));
        }
        std::sort(keyed.begin(), keyed.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [key, members] : keyed) merged.push_back(std::move(members));
        // rebuild owner: old component -> new position
        for (size_t pos = 0; pos < merged.size(); ++pos) {
            for (int v : merged[pos]) {
                for (int c = 1; c <= count; ++c)
                    if (std::binary_search(comps[c - 1].begin(), comps[c - 1].end(), v)) {
                        owner[c] = static_cast<int>(pos);
                        break;
                    }
            }
        }
    }

    MergeResult res;
    res.remap.assign(count + 1, 0);
    for (int c = 1; c <= count; ++c) res.remap[c] = owner[c] + 1;

    AggregatedInstance out;
    out.k = agg.k;
    if (on_u) {
        out.comp_u = std::move(merged);
        out.comp_v = agg.comp_v;
        out.e_u.set_size(out.comp_u.size());
        for (size_t c = 0; c < out.comp_u.size(); ++c)
            out.e_u(c) = static_cast<double>(out.comp_u[c].size());
        out.e_v = agg.e_v;
        out.a_bar.zeros(out.comp_u.size(), agg.m_bar());
        for (int c = 1; c <= count; ++c) out.a_bar.row(res.remap[c] - 1) += agg.a_bar.row(c - 1);
        for (const auto& [a, b] : agg.cl_u)
            out.cl_u.insert(make_pair_canonical(res.remap[a], res.remap[b]));
        out.cl_v = agg.cl_v;
        for (const auto& [a, b] : out.cl_u)
            if (a == b) throw std::logic_error("merge produced a cannot-link self-pair");
    } else {
        out.comp_v = std::move(merged);
        out.comp_u = agg.comp_u;
        out.e_v.set_size(out.comp_v.size());
        for (size_t c = 0; c < out.comp_v.size(); ++c)
            out.e_v(c) = static_cast<double>(out.comp_v[c].size());
        out.e_u = agg.e_u;
        out.a_bar.zeros(agg.n_bar(), out.comp_v.size());
        for (int c = 1; c <= count; ++c) out.a_bar.col(res.remap[c] - 1) += agg.a_bar.col(c - 1);
        for (const auto& [a, b] : agg.cl_v)
            out.cl_v.insert(make_pair_canonical(res.remap[a], res.remap[b]));
        out.cl_u = agg.cl_u;
        for (const auto& [a, b] : out.cl_v)
            if (a == b) throw std::logic_error("merge produced a cannot-link self-pair");
    }
    res.agg = std::move(out);
    return res;
}

} // namespace cbicl
