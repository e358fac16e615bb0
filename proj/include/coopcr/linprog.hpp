#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace coopcr {

/// Dense LP in the canonical form used throughout this project:
///
///   maximize    c.x
///   subject to  a_eq.x  = b_eq
///               a_ub.x <= b_ub
///               x >= 0
///
/// Rows are stored dense; every problem solved here has at most a few
/// hundred variables (two blocks of |S|*(I+1) policy probabilities).
struct LpProblem {
    std::size_t n = 0;                          // number of variables
    std::vector<double> c;                      // length n
    std::vector<std::vector<double>> a_eq;      // each row length n
    std::vector<double> b_eq;
    std::vector<std::vector<double>> a_ub;
    std::vector<double> b_ub;
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus s);

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;          // primal point (length n when optimal)
    double objective = 0.0;
    std::vector<double> dual_eq;    // one multiplier per equality row (free sign)
    std::vector<double> dual_ub;    // one multiplier per inequality row (>= 0)
    std::size_t iterations = 0;     // simplex pivots, both phases
};

/// Two-phase primal simplex on a dense tableau. Deterministic: Dantzig
/// pricing with lowest-index tie break, switching to Bland's rule after a
/// long degenerate stall. Throws std::invalid_argument on inconsistent
/// dimensions or non-finite input.
LpSolution solve_lp(const LpProblem& p);

namespace lp_detail {
constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;
}  // namespace lp_detail

}  // namespace coopcr
