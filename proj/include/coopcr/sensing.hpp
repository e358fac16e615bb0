#pragma once

#include <string>
#include <vector>

#include "coopcr/objective.hpp"
#include "coopcr/optimizer.hpp"
#include "coopcr/policy.hpp"
#include "coopcr/system_params.hpp"

namespace coopcr {

/// Cooperative spectrum sensing quality: every SU sees the same (possibly
/// wrong) busy/idle verdict each slot, independently across slots.
struct SensingModel {
    double p_detect = 1.0;       // Pr{ sense busy | channel busy }
    double p_false_alarm = 0.0;  // Pr{ sense busy | channel idle }
};

/// Necessary range for the stationary busy probability under imperfect
/// sensing. `empty` marks an instance whose arrival rate cannot be carried
/// at any q_b; `diagnostic` explains degenerate parameter corners.
struct QbInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty = false;
    std::string diagnostic;
};

QbInterval qb_bounds(const SystemParams& params, const SensingModel& sensing);

struct GResult {
    bool feasible = false;
    double value = 0.0;
    ConditionalPolicy policy;
    std::size_t iterations = 0;
};

/// Inner problem with the busy probability pinned: the PU-rate balance and
/// the mixed power rows become linear in the conditional tables. The SU
/// rate picks up the idle-sensed-idle factor (1 - q_b) (1 - P_F).
GResult solve_at_busy_prob(const SystemParams& params, const SensingModel& sensing, double q_b,
                const Objective& objective);

struct SensingSearch {
    enum class Mode { grid, ternary };
    Mode mode = Mode::grid;
    std::size_t grid_points = 201;
    double eps_qb = 1e-6;  // ternary: final interval width
};

struct CurvePoint {
    double q_b = 0.0;
    bool feasible = false;
    double value = 0.0;
};

struct SensingSolveReport {
    SolveStatus status = SolveStatus::infeasible;
    double q_b_star = 0.0;
    double value = 0.0;
    ConditionalPolicy policy;
    std::vector<CurvePoint> curve;          // sampled (q_b, g(q_b))
    std::size_t concavity_triples = 0;      // evaluated midpoint checks
    std::size_t concavity_violations = 0;   // beyond 1e-9
};

/// Outer one-dimensional search over the busy probability. Grid mode is
/// exhaustive over the admissible interval (then polishes the winning
/// bracket); ternary mode assumes the sampled curve is unimodal, which the
/// concavity diagnostic makes auditable instead of silent.
SensingSolveReport solve_sensing(const SystemParams& params, const SensingModel& sensing,
                              const Objective& objective, const SensingSearch& search);

}  // namespace coopcr
