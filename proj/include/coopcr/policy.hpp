#pragma once

#include <string>
#include <vector>

#include "coopcr/system_params.hpp"

namespace coopcr {

/// Absolute tolerance on probability-mass sums. Solver outputs are inexact;
/// the simulator renormalizes before sampling.
constexpr double kPolicyTol = 1e-9;

/// Joint (linearized) form of a busy/idle randomized policy.
/// q_e[s][i] = Pr{channel idle AND SU s sends own data at level i},
/// q_b[s][i] = Pr{channel busy AND SU s assists at level i}.
/// All entries nonnegative; everything sums to one. Level 0 carries the
/// "no transmission" / "no assistance" mass and must stay explicit.
struct JointPolicy {
    LevelTable q_e;
    LevelTable q_b;
};

/// Conditional form: the busy-state probability plus one conditional action
/// table per sensed state. Each table sums to one, except that a state with
/// zero probability carries an all-zero table (degenerate convention that
/// keeps the joint<->conditional round trip total).
struct ConditionalPolicy {
    double busy_prob = 0.0;
    double idle_prob = 1.0;
    LevelTable cond_busy;   // q(s,i|b)
    LevelTable cond_idle;   // q(s,i|e)
};

/// Stationary policy of the relaxed class that may silence the PU:
/// assist[s][i] = Pr{PU transmits, SU s assists at level i},
/// own[s][i] = Pr{only SU s transmits its own packet, at level i}.
struct RelaxedPolicy {
    LevelTable assist;
    LevelTable own;
};

std::vector<std::string> check_policy(const JointPolicy& p);
std::vector<std::string> check_policy(const ConditionalPolicy& p);
std::vector<std::string> check_policy(const RelaxedPolicy& p);

JointPolicy to_joint(const ConditionalPolicy& cond);
ConditionalPolicy to_conditional(const JointPolicy& joint);

/// Long-term own-data success rate per SU: sum_i r_s(i) q_e[s][i].
std::vector<double> su_rates(const JointPolicy& p, const SystemParams& params);
std::vector<double> su_rates(const ConditionalPolicy& p, const SystemParams& params);

/// Average PU service rate: sum_{s,i} r_p(s,i) q(s,i|b).
double pu_service_rate(const ConditionalPolicy& p, const SystemParams& params);

/// Average power per SU: sum_i P_s(i) (q_e[s][i] + q_b[s][i]).
std::vector<double> avg_power(const JointPolicy& p, const SystemParams& params);
std::vector<double> avg_power(const ConditionalPolicy& p, const SystemParams& params);

// Small helpers shared by solvers and the simulator.
double table_sum(const LevelTable& t);
LevelTable zero_table_like(const SystemParams& params);

}  // namespace coopcr
