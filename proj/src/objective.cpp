#include "coopcr/objective.hpp"

#include <algorithm>
#include <cmath>

namespace coopcr {

double Objective::value(const std::vector<double>& rates) const {
    check(rates.size());
    std::vector<double> r = rates;
    if (kind == Kind::saturated)
        for (std::size_t s = 0; s < r.size(); ++s) r[s] = std::min(r[s], caps[s]);
    const Kind family = kind == Kind::saturated ? inner : kind;
    double v = 0.0;
    if (family == Kind::weighted_sum) {
        for (std::size_t s = 0; s < r.size(); ++s) v += weights[s] * r[s];
    } else {
        for (double rs : r) v += std::log(delta + rs);
    }
    return v;
}

}  // namespace coopcr
