#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace coopcr {

/// Utility placed on the vector of long-term SU rates. Three families:
///  - weighted_sum:  sum_s w_s r_s                       (linear)
///  - log_utility:   sum_s log(delta + r_s), delta > 0   (smooth concave)
///  - saturated:     inner family applied to min(cap_s, r_s) per SU,
///                   the exogenous-arrival throughput objective.
struct Objective {
    enum class Kind { weighted_sum, log_utility, saturated };

    Kind kind = Kind::weighted_sum;
    std::vector<double> weights;   // weighted_sum (and saturated/weighted inner)
    double delta = 1e-6;           // log_utility offset
    Kind inner = Kind::weighted_sum;  // wrapped family when kind == saturated
    std::vector<double> caps;         // per-SU rate caps when kind == saturated

    static Objective sum_rate(std::size_t n) {
        Objective o;
        o.kind = Kind::weighted_sum;
        o.weights.assign(n, 1.0);
        return o;
    }
    static Objective weighted(std::vector<double> w) {
        Objective o;
        o.kind = Kind::weighted_sum;
        o.weights = std::move(w);
        return o;
    }
    static Objective log_utility_of(std::size_t n, double delta = 1e-6) {
        Objective o;
        o.kind = Kind::log_utility;
        o.weights.assign(n, 1.0);
        o.delta = delta;
        return o;
    }
    static Objective saturated_of(const Objective& base, std::vector<double> caps) {
        if (base.kind == Kind::saturated) throw std::invalid_argument("objective: nested saturation");
        Objective o = base;
        o.inner = base.kind;
        o.kind = Kind::saturated;
        o.caps = std::move(caps);
        return o;
    }

    std::size_t num_sus() const { return weights.size(); }
    bool is_linear() const {
        return kind == Kind::weighted_sum || (kind == Kind::saturated && inner == Kind::weighted_sum);
    }

    void check(std::size_t n) const {
        if (weights.size() != n) throw std::invalid_argument("objective: weight count mismatch");
        for (double w : weights)
            if (w < 0.0) throw std::invalid_argument("objective: negative weight");
        if ((kind == Kind::log_utility || (kind == Kind::saturated && inner == Kind::log_utility)) && !(delta > 0.0))
            throw std::invalid_argument("objective: log offset must be positive");
        if (kind == Kind::saturated) {
            if (caps.size() != n) throw std::invalid_argument("objective: cap count mismatch");
            for (double c : caps)
                if (c < 0.0) throw std::invalid_argument("objective: negative cap");
        }
    }

    /// Utility of a rate vector (caps applied when saturated).
    double value(const std::vector<double>& rates) const;
};

}  // namespace coopcr
