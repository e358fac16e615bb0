#pragma once

#include <cstdint>
#include <vector>

#include "coopcr/objective.hpp"
#include "coopcr/optimizer.hpp"
#include "coopcr/policy.hpp"
#include "coopcr/system_params.hpp"

namespace coopcr {

/// Everything one SU node knows: its own tables and budget, never a
/// neighbour's. Node updates take this struct by design, so reaching for
/// foreign parameters is a compile error, not a convention.
struct NodeParams {
    std::vector<double> power;         // P_s(i)
    std::vector<double> su_success;    // r_s(i)
    std::vector<double> coop_success;  // r_p(s,i)
    double budget = 0.0;               // power cap
};

NodeParams node_params(const SystemParams& params, std::size_t s);

/// Per-node utility f_s: weight * r for the weighted-sum family,
/// log(delta + r) for the log family.
struct NodeUtility {
    Objective::Kind kind = Objective::Kind::weighted_sum;
    double weight = 1.0;
    double delta = 1e-6;

    double value(double r) const;
    double slope(double r) const;
};

struct NodeState {
    std::vector<double> idle;        // q(e,s,.) block
    std::vector<double> busy;        // q(b,s,.) block
    double slack = 0.0;              // power-row slack variable
    double power_dual = 0.0;         // multiplier of the power row
};

struct SharedDuals {
    double rate_dual = 0.0;  // multiplier of the PU-rate row
    double mass_dual = 0.0;  // multiplier of the total-mass row
    double rho = 0.1;        // penalty parameter
};

struct AdmmState {
    std::vector<NodeState> nodes;
    SharedDuals duals;
};

struct BroadcastMessage {
    std::uint32_t iteration = 0;
    std::uint16_t sender = 0;
    enum class Kind : std::uint8_t { idle_mass, busy_pair, convergence } kind = Kind::idle_mass;
    double a = 0.0;  // g2s(x) | g1s(z) | unused
    double b = 0.0;  // unused | g2s(z) | unused
};

struct BroadcastLog {
    std::vector<BroadcastMessage> messages;
    std::size_t data_count(std::uint32_t iteration) const;
};

struct AdmmOptions {
    double rho = 0.1;
    double epsilon = 1e-5;          // per-node successive-difference threshold
    std::size_t max_iterations = 100000;
};

struct AdmmResult {
    SolveStatus status = SolveStatus::not_converged;
    JointPolicy policy;
    double objective = 0.0;
    std::vector<double> su_rate;
    std::vector<double> su_power;
    std::size_t iterations = 0;
    AdmmState state;                  // final primal/dual point (warm-start input for later runs)
    BroadcastLog log;
    std::size_t guard_delays = 0;     // iterations the residual guard vetoed after all nodes settled
    std::vector<double> residual_trace;   // max coupling-row residual per iteration
    std::vector<double> objective_trace;  // sum_s f_s per iteration
};

/// The stated cold start: every idle entry 0.01, every busy entry 0.03,
/// all multipliers 1, slack set so the power row starts tight.
AdmmState admm_cold_start(const SystemParams& params, const AdmmOptions& options = {});

/// Decentralized solve over SU nodes: sequential idle-block updates (each
/// node folding in the masses already broadcast this round), sequential
/// busy-block updates, closed-form slack updates, then the dual sweeps.
/// Terminates when every node's successive utility difference is below
/// epsilon and all coupling-row residuals are within 10*epsilon.
AdmmResult admm_solve(const SystemParams& params, const Objective& objective,
                      const AdmmOptions& options, const AdmmState* warm_start = nullptr);

// Node-local blocks, exposed for direct testing.

/// Idle-block update: minimizes the node's augmented-Lagrangian slice over
/// x >= 0 to projected-gradient stationarity 1e-10. `mass_rest` is the mass
/// sum over everything except this block, minus one.
std::vector<double> update_idle_block(const NodeParams& node, const NodeUtility& f,
                                      const SharedDuals& duals, double power_dual,
                                      const std::vector<double>& start,
                                      const std::vector<double>& busy_current, double slack_current,
                                      double mass_rest);

/// Busy-block update; `rate_rest` and `mass_rest` are the foreign parts of
/// the PU-rate and mass rows (minus their targets).
std::vector<double> update_busy_block(const NodeParams& node, const SharedDuals& duals,
                                      double power_dual, const std::vector<double>& start,
                                      const std::vector<double>& idle_new, double slack_current,
                                      double rate_rest, double mass_rest);

/// Slack update, closed form.
double update_slack(double budget, double powerload, double power_dual, double rho);

}  // namespace coopcr
