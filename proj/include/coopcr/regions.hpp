#pragma once

#include <vector>

#include "coopcr/linprog.hpp"
#include "coopcr/policy.hpp"
#include "coopcr/system_params.hpp"

namespace coopcr {

/// Largest PU arrival rate a busy/idle randomized policy can stabilize:
/// the value of   max sum r_p(s,i) x(b,s,i)
///                s.t. sum_i P_s(i) x(b,s,i) <= budget_s  per SU,
///                     sum x <= 1,  x >= 0.
/// Always >= solo_success (put all mass on level 0).
double max_stable_rate(const SystemParams& params);

struct StabilityCertificate {
    double lambda_hat = 0.0;
    LevelTable coop_mass;   // optimizing x(b,s,i)
    LpSolution lp;          // primal/dual certificate
};
StabilityCertificate max_stable_rate_certificate(const SystemParams& params);

struct RegionPoint {
    std::vector<double> weights;
    std::vector<double> rates;
    double value = 0.0;
};

/// Support-function sweep of the achievable rate region at a fixed PU
/// arrival rate: one weighted-rate solve per direction. Throws on an
/// unstable lambda_p; directions must be nonnegative and nonzero.
std::vector<RegionPoint> rate_region_boundary(const SystemParams& params, double lambda_p,
                                              const std::vector<std::vector<double>>& directions);

struct RelaxedSolve {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    RelaxedPolicy policy;
    std::vector<double> rates;
};

/// Best weighted SU rate over the relaxed policy class (PU priority
/// dropped): max w.r(own) subject to PU stability as an inequality, power
/// rows and the probability simplex.
RelaxedSolve relaxed_max_weighted_rate(const SystemParams& params, double lambda_p,
                             const std::vector<double>& w);

/// Constructive reduction of a feasible relaxed policy to a busy/idle one
/// with the same SU rates and no more power per SU. The slack in the PU
/// stability inequality is removed by folding assistance mass into level 0
/// (and, when even zero-power assistance over-serves, by shrinking the
/// transmit probability itself).
JointPolicy convert_relaxed_policy(const RelaxedPolicy& p, const SystemParams& params, double lambda_p);

}  // namespace coopcr
