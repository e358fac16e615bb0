#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "coopcr/admm.hpp"
#include "coopcr/policy.hpp"
#include "coopcr/system_params.hpp"

namespace coopcr {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// System instances live in a line-oriented `key = values` text format with
/// `#` comments. Level tables take one value per level (level 0 included);
/// an unindexed key applies to every SU, `key[s]` overrides one SU.
/// `power_budget` accepts one value (broadcast) or one per SU.
SystemParams parse_system_params(const std::string& text);
SystemParams load_system_params(const std::string& path);
std::string format_system_params(const SystemParams& params);

/// Policies travel as flat CSV: state (e|b), su, level, probability.
std::string policy_to_csv(const JointPolicy& policy);
JointPolicy policy_from_csv(const std::string& text);
void save_policy_csv(const std::string& path, const JointPolicy& policy);
JointPolicy load_policy_csv(const std::string& path);

/// ... and in the same key = values format as the system configuration,
/// one `q_e[s]` / `q_b[s]` line per SU.
std::string policy_to_text(const JointPolicy& policy);
JointPolicy policy_from_text(const std::string& text);

/// Full solver state for warm starts: node blocks plus the shared duals.
std::string admm_state_to_text(const AdmmState& state);
AdmmState admm_state_from_text(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Shortest round-trippable decimal form, locale-independent.
std::string format_double(double v);

}  // namespace coopcr
