#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace coopcr {

using LevelTable = std::vector<std::vector<double>>;  // [su][level], level 0 included

/// Static description of the channel: one licensed primary user, num_sus()
/// secondary users, and per-user discrete transmit power levels. Success
/// probabilities are primitive inputs; no SNR model sits behind them.
struct SystemParams {
    LevelTable power_levels;      // P_s(i), strictly increasing, P_s(0) = 0
    LevelTable su_success;        // r_s(i): own-packet success at level i, r_s(0) = 0
    LevelTable coop_success;      // r_p(s,i): PU success when SU s assists at level i
    double solo_success = 0.0;    // r_p(0): PU success with no assistance
    std::vector<double> power_budget;  // long-term average power cap per SU
    double pu_arrival_rate = 0.0;      // mean PU packets per slot

    std::size_t num_sus() const { return power_levels.size(); }
    std::size_t num_levels(std::size_t s) const { return power_levels[s].size(); }
    std::size_t total_levels() const;      // sum of num_levels(s)
    double max_coop_success() const;       // max over (s,i) of r_p(s,i)
};

/// Checks every structural invariant and returns one message per violation
/// (empty means the instance is well formed). Violations are data, not
/// faults: the caller decides whether to stop.
std::vector<std::string> validate(const SystemParams& params);

/// Throws std::invalid_argument listing all violations.
void require_valid(const SystemParams& params);

}  // namespace coopcr
