#include "coopcr/system_params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace coopcr {

std::size_t SystemParams::total_levels() const {
    std::size_t n = 0;
    for (const auto& lv : power_levels) n += lv.size();
    return n;
}

double SystemParams::max_coop_success() const {
    double m = solo_success;
    for (const auto& row : coop_success)
        for (double v : row) m = std::max(m, v);
    return m;
}

std::vector<std::string> validate(const SystemParams& p) {
    std::vector<std::string> out;
    auto add = [&](const std::string& msg) { out.push_back(msg); };
    auto idx = [](std::size_t s, std::size_t i) {
        std::ostringstream os;
        os << "(" << s << "," << i << ")";
        return os.str();
    };

    const std::size_t n = p.num_sus();
    if (n == 0) add("no secondary users defined");
    if (p.su_success.size() != n) add("su_success has wrong number of users");
    if (p.coop_success.size() != n) add("coop_success has wrong number of users");
    if (p.power_budget.size() != n) add("power_budget has wrong number of users");
    if (!out.empty()) return out;  // shape is broken; per-entry checks would throw

    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t L = p.num_levels(s);
        if (L < 1) {
            add("power_levels empty for su " + std::to_string(s));
            continue;
        }
        if (p.su_success[s].size() != L) add("su_success length mismatch for su " + std::to_string(s));
        if (p.coop_success[s].size() != L) add("coop_success length mismatch for su " + std::to_string(s));
        if (p.su_success[s].size() != L || p.coop_success[s].size() != L) continue;

        if (p.power_levels[s][0] != 0.0) add("power_levels[" + std::to_string(s) + "][0] must be 0");
        for (std::size_t i = 0; i + 1 < L; ++i)
            if (!(p.power_levels[s][i] < p.power_levels[s][i + 1]))
                add("power_levels not strictly increasing at " + idx(s, i + 1));
        for (std::size_t i = 0; i < L; ++i) {
            if (!(p.power_levels[s][i] >= 0.0) || !std::isfinite(p.power_levels[s][i]))
                add("power_levels negative or non-finite at " + idx(s, i));
            if (p.su_success[s][i] < 0.0 || p.su_success[s][i] > 1.0 || !std::isfinite(p.su_success[s][i]))
                add("su_success outside [0,1] at " + idx(s, i));
            if (p.coop_success[s][i] < 0.0 || p.coop_success[s][i] > 1.0 || !std::isfinite(p.coop_success[s][i]))
                add("coop_success outside [0,1] at " + idx(s, i));
        }
        if (p.su_success[s][0] != 0.0) add("su_success[" + std::to_string(s) + "][0] must be 0");
        if (std::fabs(p.coop_success[s][0] - p.solo_success) > 0.0)
            add("coop_success[" + std::to_string(s) + "][0] must equal solo_success");
        for (std::size_t i = 0; i + 1 < L; ++i)
            if (p.coop_success[s][i] > p.coop_success[s][i + 1])
                add("coop_success not monotone at " + idx(s, i + 1));
        if (p.power_budget[s] < 0.0 || !std::isfinite(p.power_budget[s]))
            add("power_budget negative or non-finite for su " + std::to_string(s));
    }
    if (p.solo_success < 0.0 || p.solo_success > 1.0 || !std::isfinite(p.solo_success))
        add("solo_success outside [0,1]");
    if (p.pu_arrival_rate < 0.0 || !std::isfinite(p.pu_arrival_rate))
        add("pu_arrival_rate negative or non-finite");
    return out;
}

void require_valid(const SystemParams& p) {
    const auto issues = validate(p);
    if (issues.empty()) return;
    std::string msg = "invalid system parameters:";
    for (const auto& m : issues) msg += "\n  " + m;
    throw std::invalid_argument(msg);
}

}  // namespace coopcr
