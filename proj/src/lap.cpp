#include "cbicl/lap.h"

#include <limits>
#include <stdexcept>

namespace cbicl {

std::vector<int> solve_lap_max(const arma::mat& W) {
    if (W.n_rows != W.n_cols) throw std::invalid_argument("solve_lap_max: matrix must be square");
    const int n = static_cast<int>(W.n_rows);
    const double inf = std::numeric_limits<double>::infinity();

    // minimize cost = -W with the potentials algorithm; 1-based with dummy index 0
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            int i0 = p[j0], j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = -W(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> perm(n, -1);
    for (int j = 1; j <= n; ++j) perm[p[j] - 1] = j - 1;
    return perm;
}

double lap_value(const arma::mat& W, const std::vector<int>& perm) {
    double total = 0.0;
    for (size_t i = 0; i < perm.size(); ++i) total += W(i, perm[i]);
    return total;
}

} // namespace cbicl
