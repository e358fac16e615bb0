#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "coopcr/linprog.hpp"
#include "coopcr/system_params.hpp"

namespace coopcr::testing {

/// Brute-force LP oracle, independent of the simplex implementation: puts
/// the problem in standard form (slacks appended), enumerates every basis,
/// solves the square system by Gaussian elimination and keeps the best
/// feasible basic solution. Exponential, so only for small problems.
struct BfsEnumeration {
    bool feasible = false;
    double objective = -std::numeric_limits<double>::infinity();
    std::vector<double> x;  // structural variables only
};

inline BfsEnumeration enumerate_basic_solutions(const LpProblem& p) {
    const std::size_t me = p.a_eq.size();
    const std::size_t mu = p.a_ub.size();
    const std::size_t m = me + mu;
    const std::size_t cols = p.n + mu;

    // standard-form matrix [A | slacks], rhs b
    std::vector<std::vector<double>> A(m, std::vector<double>(cols, 0.0));
    std::vector<double> b(m, 0.0);
    for (std::size_t r = 0; r < me; ++r) {
        for (std::size_t j = 0; j < p.n; ++j) A[r][j] = p.a_eq[r][j];
        b[r] = p.b_eq[r];
    }
    for (std::size_t r = 0; r < mu; ++r) {
        for (std::size_t j = 0; j < p.n; ++j) A[me + r][j] = p.a_ub[r][j];
        A[me + r][p.n + r] = 1.0;
        b[me + r] = p.b_ub[r];
    }

    BfsEnumeration best;
    if (m == 0) return best;

    std::vector<std::size_t> pick(m);
    for (std::size_t i = 0; i < m; ++i) pick[i] = i;

    std::vector<std::vector<double>> M(m, std::vector<double>(m + 1));
    const double tol = 1e-9;

    auto try_basis = [&]() {
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t k = 0; k < m; ++k) M[r][k] = A[r][pick[k]];
            M[r][m] = b[r];
        }
        // Gaussian elimination with partial pivoting
        for (std::size_t c = 0; c < m; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < m; ++r)
                if (std::fabs(M[r][c]) > std::fabs(M[piv][c])) piv = r;
            if (std::fabs(M[piv][c]) < 1e-11) return;  // singular basis
            std::swap(M[c], M[piv]);
            for (std::size_t r = 0; r < m; ++r) {
                if (r == c) continue;
                const double f = M[r][c] / M[c][c];
                if (f == 0.0) continue;
                for (std::size_t k = c; k <= m; ++k) M[r][k] -= f * M[c][k];
            }
        }
        std::vector<double> xb(m);
        for (std::size_t r = 0; r < m; ++r) {
            xb[r] = M[r][m] / M[r][r];
            if (xb[r] < -tol) return;  // infeasible basic solution
        }
        double obj = 0.0;
        std::vector<double> xfull(p.n, 0.0);
        for (std::size_t k = 0; k < m; ++k)
            if (pick[k] < p.n) {
                xfull[pick[k]] = std::max(0.0, xb[k]);
                obj += p.c[pick[k]] * xb[k];
            }
        if (!best.feasible || obj > best.objective) {
            best.feasible = true;
            best.objective = obj;
            best.x = std::move(xfull);
        }
    };

    // iterate over all m-subsets of the columns
    for (;;) {
        try_basis();
        std::size_t i = m;
        while (i > 0) {
            --i;
            if (pick[i] != i + cols - m) break;
            if (i == 0) return best;
        }
        ++pick[i];
        for (std::size_t j = i + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
    }
}

/// Best own-data rate one SU can reach alone: mass <= 1, power <= budget.
/// Closed two-constraint LP solved by enumerating level pairs.
inline double single_su_best_rate(const SystemParams& p, std::size_t s) {
    const std::size_t L = p.num_levels(s);
    double best = 0.0;
    // single level
    for (std::size_t i = 0; i < L; ++i) {
        double mass = 1.0;
        if (p.power_levels[s][i] > 0.0)
            mass = std::min(1.0, p.power_budget[s] / p.power_levels[s][i]);
        best = std::max(best, p.su_success[s][i] * mass);
    }
    // pairs with both constraints tight
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i + 1; j < L; ++j) {
            const double pi = p.power_levels[s][i], pj = p.power_levels[s][j];
            const double det = pi - pj;
            if (std::fabs(det) < 1e-12) continue;
            const double mi = (p.power_budget[s] - pj) / det;
            const double mj = 1.0 - mi;
            if (mi < -1e-12 || mj < -1e-12) continue;
            best = std::max(best, p.su_success[s][i] * mi + p.su_success[s][j] * mj);
        }
    return best;
}

}  // namespace coopcr::testing
