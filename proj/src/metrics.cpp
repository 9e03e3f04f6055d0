#include "ura/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ura {

namespace {

// Potentials-based O(n^3) assignment. Returns the matched column per row.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost, double* total) {
    const int n = static_cast<int>(cost.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
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
    std::vector<int> match(n, -1);
    double sum = 0.0;
    for (int j = 1; j <= n; ++j) {
        if (p[j] == 0) continue;
        match[p[j] - 1] = j - 1;
        sum += cost[p[j] - 1][j - 1];
    }
    if (total) *total = sum;
    return match;
}

// Optimal total for the subproblem on the remaining rows/columns.
double reduced_optimum(const std::vector<std::vector<double>>& cost,
                       const std::vector<int>& rows, const std::vector<int>& cols) {
    if (rows.empty()) return 0.0;
    std::vector<std::vector<double>> sub(rows.size(), std::vector<double>(cols.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j) sub[i][j] = cost[rows[i]][cols[j]];
    double total = 0.0;
    solve_assignment(sub, &total);
    return total;
}

} // namespace

MatchResult hungarian_match(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    if (n == 0) throw std::domain_error("hungarian_match: empty cost matrix");
    for (const auto& row : cost) {
        if (static_cast<int>(row.size()) != n)
            throw std::domain_error("hungarian_match: cost matrix must be square");
        for (double c : row)
            if (!(c >= 0.0) || !std::isfinite(c))
                throw std::domain_error("hungarian_match: costs must be finite and non-negative");
    }

    double optimum = 0.0;
    solve_assignment(cost, &optimum);
    const double eps = 1e-9 * std::max(1.0, std::fabs(optimum));

    // Fix rows in order, choosing the smallest column that keeps the total
    // optimal; this yields the lexicographically smallest optimal permutation.
    MatchResult res;
    res.perm.assign(n, -1);
    std::vector<char> col_used(n, 0);
    double fixed_cost = 0.0;
    for (int i = 0; i < n; ++i) {
        std::vector<int> rest_rows;
        for (int r = i + 1; r < n; ++r) rest_rows.push_back(r);
        for (int c = 0; c < n; ++c) {
            if (col_used[c]) continue;
            std::vector<int> rest_cols;
            for (int cc = 0; cc < n; ++cc)
                if (!col_used[cc] && cc != c) rest_cols.push_back(cc);
            double attempt = fixed_cost + cost[i][c] + reduced_optimum(cost, rest_rows, rest_cols);
            if (attempt <= optimum + eps) {
                res.perm[i] = c;
                col_used[c] = 1;
                fixed_cost += cost[i][c];
                break;
            }
        }
    }

    res.total_cost = fixed_cost;
    res.row_cost.resize(n);
    for (int i = 0; i < n; ++i) res.row_cost[i] = cost[i][res.perm[i]];
    return res;
}

SerCer ser_cer(const SymbolGrid& truth, const SymbolGrid& pred) {
    if (truth.rows != pred.rows || truth.cols != pred.cols)
        throw std::domain_error("ser_cer: grid shapes must match");
    const int k = truth.rows;
    const int l = truth.cols;

    std::vector<std::vector<double>> cost(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            int d = 0;
            for (int c = 0; c < l; ++c) d += pred.at(i, c) != truth.at(j, c);
            cost[i][j] = d;
        }

    MatchResult m = hungarian_match(cost);
    SerCer out;
    int bad_rows = 0;
    for (int i = 0; i < k; ++i) bad_rows += m.row_cost[i] > 0.0;
    out.ser = m.total_cost / (static_cast<double>(k) * l);
    out.cer = static_cast<double>(bad_rows) / k;
    return out;
}

} // namespace ura
