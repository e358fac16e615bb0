#include "coopcr/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coopcr {

using lp_detail::kFeasTol;
using lp_detail::kPivotTol;

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "?";
}

namespace {

void check_problem(const LpProblem& p) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (p.c.size() != p.n) throw std::invalid_argument("lp: objective length != n");
    if (p.a_eq.size() != p.b_eq.size()) throw std::invalid_argument("lp: a_eq/b_eq row mismatch");
    if (p.a_ub.size() != p.b_ub.size()) throw std::invalid_argument("lp: a_ub/b_ub row mismatch");
    for (double v : p.c)
        if (!finite(v)) throw std::invalid_argument("lp: non-finite objective coefficient");
    auto check_rows = [&](const std::vector<std::vector<double>>& rows, const std::vector<double>& rhs) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != p.n) throw std::invalid_argument("lp: row length != n");
            if (!finite(rhs[i])) throw std::invalid_argument("lp: non-finite rhs");
            for (double v : rows[i])
                if (!finite(v)) throw std::invalid_argument("lp: non-finite coefficient");
        }
    };
    check_rows(p.a_eq, p.b_eq);
    check_rows(p.a_ub, p.b_ub);
}

// Tableau layout: columns [structural (n) | slacks (m_ub) | artificials],
// one row per constraint plus a reduced-cost row kept separately.
struct Tableau {
    std::size_t m = 0;
    std::size_t cols = 0;               // total columns excl. rhs
    std::size_t n_struct = 0;
    std::vector<std::vector<double>> t; // m rows, each cols+1 (last = rhs)
    std::vector<double> cost;           // reduced-cost row d_j = c_j - y.A_j, length cols
    double obj = 0.0;                   // current objective value
    std::vector<int> basis;             // basis[r] = column basic in row r
    std::vector<char> is_artificial;    // per column
    std::size_t pivots = 0;

    void pivot(std::size_t r, std::size_t s) {
        auto& row = t[r];
        const double inv = 1.0 / row[s];
        for (double& v : row) v *= inv;
        row[s] = 1.0;  // kill roundoff on the pivot element
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r) continue;
            const double f = t[i][s];
            if (std::fabs(f) <= kPivotTol) { t[i][s] = 0.0; continue; }
            auto& ri = t[i];
            for (std::size_t j = 0; j <= cols; ++j) ri[j] -= f * row[j];
            ri[s] = 0.0;
        }
        const double f = cost[s];
        if (std::fabs(f) > 0.0) {
            for (std::size_t j = 0; j < cols; ++j) cost[j] -= f * row[j];
            obj += f * row[cols];
            cost[s] = 0.0;
        }
        basis[r] = static_cast<int>(s);
        ++pivots;
    }

    // Reduced costs for objective vector cfull (length cols) given current basis.
    void rebuild_cost(const std::vector<double>& cfull) {
        cost = cfull;
        obj = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            const double cb = cfull[static_cast<std::size_t>(basis[r])];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) cost[j] -= cb * t[r][j];
            obj += cb * t[r][cols];
        }
        for (std::size_t r = 0; r < m; ++r) cost[static_cast<std::size_t>(basis[r])] = 0.0;
    }
};

enum class IterResult { optimal, unbounded };

// Runs primal simplex until no improving column remains. `allowed(j)` gates
// entering columns (used to lock artificials out in phase 2).
template <typename Allowed>
IterResult run_simplex(Tableau& tb, Allowed allowed) {
    const std::size_t stall_limit = 50 * (tb.m + tb.cols) + 1000;
    std::size_t stall = 0;
    double best_obj = tb.obj;
    bool bland = false;

    for (;;) {
        // entering column
        std::size_t enter = tb.cols;
        if (!bland) {
            double best = kPivotTol;
            for (std::size_t j = 0; j < tb.cols; ++j) {
                if (!allowed(j)) continue;
                if (tb.cost[j] > best) { best = tb.cost[j]; enter = j; }
            }
        } else {
            for (std::size_t j = 0; j < tb.cols; ++j) {
                if (!allowed(j)) continue;
                if (tb.cost[j] > kPivotTol) { enter = j; break; }
            }
        }
        if (enter == tb.cols) return IterResult::optimal;

        // ratio test; ties -> smallest basis column (anti-cycling with Bland)
        std::size_t leave = tb.m;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < tb.m; ++r) {
            const double a = tb.t[r][enter];
            if (a <= kPivotTol) continue;
            const double ratio = tb.t[r][tb.cols] / a;
            if (ratio < best_ratio - 1e-12 ||
                (ratio < best_ratio + 1e-12 && leave < tb.m && tb.basis[r] < tb.basis[leave])) {
                best_ratio = ratio;
                leave = r;
            }
        }
        if (leave == tb.m) return IterResult::unbounded;

        tb.pivot(leave, enter);

        if (tb.obj > best_obj + 1e-13) {
            best_obj = tb.obj;
            stall = 0;
        } else if (++stall > stall_limit) {
            bland = true;  // degenerate cycle suspected
        }
    }
}

}  // namespace

LpSolution solve_lp(const LpProblem& p) {
    check_problem(p);

    const std::size_t me = p.a_eq.size();
    const std::size_t mu = p.a_ub.size();
    const std::size_t m = me + mu;

    // Row order: equalities first, then inequalities. sign[r] = -1 when the
    // row was negated to make the rhs nonnegative.
    std::vector<double> sign(m, 1.0);
    std::vector<std::size_t> slack_col(mu, 0);
    std::vector<int> art_col(m, -1);

    std::size_t cols = p.n + mu;
    for (std::size_t i = 0; i < me; ++i)
        if (p.b_eq[i] < 0) sign[i] = -1.0;
    for (std::size_t i = 0; i < mu; ++i)
        if (p.b_ub[i] < 0) sign[me + i] = -1.0;

    std::size_t n_art = me;  // every equality row gets an artificial
    for (std::size_t i = 0; i < mu; ++i)
        if (sign[me + i] < 0) ++n_art;  // flipped slack can't seed the basis
    cols += n_art;

    Tableau tb;
    tb.m = m;
    tb.cols = cols;
    tb.n_struct = p.n;
    tb.t.assign(m, std::vector<double>(cols + 1, 0.0));
    tb.basis.assign(m, -1);
    tb.is_artificial.assign(cols, 0);

    std::size_t next_art = p.n + mu;
    for (std::size_t r = 0; r < m; ++r) {
        const bool eq = r < me;
        const auto& arow = eq ? p.a_eq[r] : p.a_ub[r - me];
        const double rhs = eq ? p.b_eq[r] : p.b_ub[r - me];
        for (std::size_t j = 0; j < p.n; ++j) tb.t[r][j] = sign[r] * arow[j];
        tb.t[r][cols] = sign[r] * rhs;
        if (!eq) {
            slack_col[r - me] = p.n + (r - me);
            tb.t[r][slack_col[r - me]] = sign[r];  // slack entered before the flip
        }
        if (eq || sign[r] < 0) {
            art_col[r] = static_cast<int>(next_art);
            tb.t[r][next_art] = 1.0;
            tb.is_artificial[next_art] = 1;
            tb.basis[r] = static_cast<int>(next_art);
            ++next_art;
        } else {
            tb.basis[r] = static_cast<int>(slack_col[r - me]);
        }
    }

    LpSolution sol;

    // Phase 1: maximize -sum(artificials).
    if (n_art > 0) {
        std::vector<double> c1(cols, 0.0);
        for (std::size_t j = 0; j < cols; ++j)
            if (tb.is_artificial[j]) c1[j] = -1.0;
        tb.rebuild_cost(c1);
        run_simplex(tb, [&](std::size_t j) { return !tb.is_artificial[j] || tb.cost[j] > kPivotTol; });
        if (tb.obj < -kFeasTol) {
            sol.status = LpStatus::infeasible;
            sol.iterations = tb.pivots;
            return sol;
        }
        // Drive leftover artificials out of the basis where possible; rows
        // with no eligible pivot are redundant and keep a zero artificial.
        for (std::size_t r = 0; r < m; ++r) {
            const auto b = static_cast<std::size_t>(tb.basis[r]);
            if (!tb.is_artificial[b]) continue;
            for (std::size_t j = 0; j < cols; ++j) {
                if (tb.is_artificial[j]) continue;
                if (std::fabs(tb.t[r][j]) > 1e-7) {
                    tb.pivot(r, j);
                    break;
                }
            }
        }
    }

    // Phase 2: the real objective.
    std::vector<double> c2(cols, 0.0);
    for (std::size_t j = 0; j < p.n; ++j) c2[j] = p.c[j];
    tb.rebuild_cost(c2);
    const IterResult r2 = run_simplex(tb, [&](std::size_t j) { return !tb.is_artificial[j]; });
    sol.iterations = tb.pivots;
    if (r2 == IterResult::unbounded) {
        sol.status = LpStatus::unbounded;
        return sol;
    }

    sol.status = LpStatus::optimal;
    sol.x.assign(p.n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const auto b = static_cast<std::size_t>(tb.basis[r]);
        if (b < p.n) sol.x[b] = std::max(0.0, tb.t[r][cols]);
    }
    sol.objective = tb.obj;

    // Row prices. For the unit column u added to internal row r (artificial:
    // +e_r, slack: sign*e_r) the reduced cost is -y_r resp. -sign*y_r, and
    // the caller-facing dual of the original row is sign * y_r.
    sol.dual_eq.assign(me, 0.0);
    sol.dual_ub.assign(mu, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        double y;
        if (art_col[r] >= 0)
            y = -tb.cost[static_cast<std::size_t>(art_col[r])];
        else
            y = -sign[r] * tb.cost[slack_col[r - me]];
        const double orig = sign[r] * y;
        if (r < me)
            sol.dual_eq[r] = orig;
        else
            sol.dual_ub[r - me] = std::max(0.0, orig);
    }
    return sol;
}

}  // namespace coopcr
