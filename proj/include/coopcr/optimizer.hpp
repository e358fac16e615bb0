#pragma once

#include <functional>
#include <vector>

#include "coopcr/linprog.hpp"
#include "coopcr/objective.hpp"
#include "coopcr/policy.hpp"
#include "coopcr/system_params.hpp"

namespace coopcr {

enum class SolveStatus { optimal, infeasible, unbounded, not_converged };

const char* to_string(SolveStatus s);

struct SolveReport {
    SolveStatus status = SolveStatus::infeasible;
    JointPolicy policy;
    double objective = 0.0;
    std::vector<double> su_rate;      // model evaluators applied to policy
    std::vector<double> su_power;
    std::size_t iterations = 0;
    // Populated by solve_throughput only:
    std::vector<double> throughput;   // delivered rate R_s = min(arrival, offered)
    std::vector<double> admission;    // flow-control admission probability per SU
};

/// Centralized solve of the busy/idle policy program at the configured PU
/// arrival rate: maximize the utility of the SU rate vector subject to the
/// PU service-rate equality, per-SU average power caps, unit total mass and
/// nonnegativity. Linear utilities go through the simplex kernel; smooth
/// concave ones through away-step Frank-Wolfe with a duality-gap
/// certificate of 1e-6.
SolveReport solve_policy(const SystemParams& params, const Objective& objective);

/// Exogenous-arrival variant: maximizes the utility of delivered throughput
/// min(arrival_s, offered rate_s) via auxiliary throughput variables, and
/// reports the flow-control admission probabilities.
SolveReport solve_throughput(const SystemParams& params, const std::vector<double>& su_arrival_rate,
                             const Objective& objective);

namespace opt_detail {

/// Feasible set of the policy program as canonical LP rows (no objective).
LpProblem policy_constraints(const SystemParams& params, double lambda_p);

/// Away-step Frank-Wolfe over an LP-described polytope. `value_grad` must
/// return the objective value and fill the gradient at x. Returns the final
/// point; `gap_out`/`iters_out` report the certificate.
std::vector<double> frank_wolfe(
    const LpProblem& polytope,
    const std::function<double(const std::vector<double>&, std::vector<double>&)>& value_grad,
    double gap_tol, std::size_t max_iters, double* gap_out, std::size_t* iters_out);

}  // namespace opt_detail

}  // namespace coopcr
