#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "coopcr/policy.hpp"
#include "coopcr/sensing.hpp"
#include "coopcr/system_params.hpp"

namespace coopcr {

struct ArrivalSpec {
    enum class Law { bernoulli, poisson };
    Law law = Law::bernoulli;
    double rate = 0.0;
};

struct SimConfig {
    std::int64_t horizon = 1000000;  // slots
    std::uint64_t seed = 1;
    ArrivalSpec pu_arrival;                             // rate defaults from params if < 0
    std::optional<std::vector<ArrivalSpec>> su_arrivals;  // absent = infinitely backlogged
    std::optional<SensingModel> sensing;                  // absent = perfect sensing
    std::optional<std::vector<double>> admission;         // flow-control p^a per SU, default all 1
    double warmup_fraction = 0.05;  // leading slots excluded from averages

    SimConfig() { pu_arrival.rate = -1.0; }
};

struct SimReport {
    std::int64_t slots = 0;          // horizon
    std::int64_t counted_slots = 0;  // after warmup

    // Throughput and service (per counted slot).
    std::vector<double> su_throughput;       // delivered own-data packets per slot
    double pu_throughput = 0.0;              // delivered PU packets per slot
    double pu_service_rate = 0.0;            // PU successes per truly-busy slot
    double busy_fraction = 0.0;              // fraction of counted slots with Q_p > 0

    // PU queue trajectory.
    double mean_backlog = 0.0;               // average Q_p over counted slots
    std::int64_t final_backlog = 0;          // Q_p at the horizon
    double backlog_over_horizon = 0.0;       // Q_p(T) / T

    // Power, both accountings: `charged` bills every drawn level, `spent`
    // skips draws where an empty queue meant nothing was radiated.
    std::vector<double> su_power_charged;
    std::vector<double> su_power_spent;

    // Exogenous-arrival bookkeeping.
    std::vector<std::int64_t> su_arrived;
    std::vector<std::int64_t> su_dropped;    // rejected by flow control

    // Sensing-event tallies over counted slots:
    // [busy&sensed-busy, busy&sensed-idle, idle&sensed-idle, idle&sensed-busy].
    std::int64_t event_tally[4] = {0, 0, 0, 0};
    std::int64_t collisions = 0;             // PU and SU data transmitted together

    // Exact conservation over the whole run (warmup included).
    std::int64_t pu_arrived = 0;
    std::int64_t pu_delivered = 0;
};

/// Runs the slotted system under a busy/idle conditional policy. All
/// randomness comes from the seeded generator; identical inputs give an
/// identical report.
SimReport simulate(const SystemParams& params, const ConditionalPolicy& policy,
                   const SimConfig& config);

struct ScanRow {
    double lambda_p = 0.0;
    bool solved = false;
    double analytic_objective = 0.0;
    double analytic_busy_prob = 0.0;
    double sum_throughput = 0.0;
    double busy_fraction = 0.0;
    double mean_backlog = 0.0;
    double backlog_over_horizon = 0.0;
    double max_su_power = 0.0;
};

/// Sweeps the PU arrival rate, building one policy per grid point and
/// simulating it. The factory returns the policy to run (or throws to mark
/// the point unsolved, which is recorded rather than fatal).
std::vector<ScanRow> stability_scan(
    const SystemParams& params, const std::function<ConditionalPolicy(double)>& policy_factory,
    const std::vector<double>& lambda_grid, const SimConfig& base_config);

}  // namespace coopcr
