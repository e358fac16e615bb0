#include "coopcr/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coopcr/layout.hpp"

namespace coopcr {

namespace {

void check_sensing(const SensingModel& m) {
    if (m.p_detect < 0.0 || m.p_detect > 1.0 || !std::isfinite(m.p_detect))
        throw std::invalid_argument("sensing: p_detect outside [0,1]");
    if (m.p_false_alarm < 0.0 || m.p_false_alarm > 1.0 || !std::isfinite(m.p_false_alarm))
        throw std::invalid_argument("sensing: p_false_alarm outside [0,1]");
}

}  // namespace

QbInterval qb_bounds(const SystemParams& params, const SensingModel& sensing) {
    require_valid(params);
    check_sensing(sensing);
    const double lambda_p = params.pu_arrival_rate;
    const double pd = sensing.p_detect;
    const double rp0 = params.solo_success;
    const double rpmax = params.max_coop_success();

    QbInterval out;
    if (lambda_p == 0.0) {
        out.lo = 0.0;
        out.hi = 0.0;
        return out;
    }
    const double denom_lo = pd * rpmax + (1.0 - pd) * rp0;
    out.lo = denom_lo > 0.0 ? lambda_p / denom_lo : std::numeric_limits<double>::infinity();
    out.hi = pd * rp0 > 0.0 ? std::min(lambda_p / (pd * rp0), 1.0) : 1.0;
    if (out.lo > out.hi || out.lo > 1.0) {
        out.empty = true;
        out.diagnostic = "no busy probability can carry the arrival rate";
    }
    if (pd == 0.0)
        out.diagnostic = "detection probability is zero: the PU is served only in slots "
                         "where the (misread) idle table draws level 0";
    return out;
}

GResult solve_at_busy_prob(const SystemParams& params, const SensingModel& sensing, double q_b,
                const Objective& objective) {
    require_valid(params);
    check_sensing(sensing);
    objective.check(params.num_sus());
    if (objective.kind == Objective::Kind::saturated)
        throw std::invalid_argument("solve_at_busy_prob: saturated objectives are not supported here");
    if (q_b < 0.0 || q_b > 1.0) throw std::invalid_argument("solve_at_busy_prob: q_b outside [0,1]");

    const double q_e = 1.0 - q_b;
    const double pd = sensing.p_detect;
    const double pf = sensing.p_false_alarm;
    const double lambda_p = params.pu_arrival_rate;
    const double busy_weight = q_b * pd + q_e * pf;   // sensed-busy slot fraction
    const double idle_factor = q_e * (1.0 - pf);      // idle slots seen as idle

    // Variables: [idle table | busy table] (conditional probabilities).
    const VarLayout lay(params);
    LpProblem polytope;
    polytope.n = lay.size();
    polytope.c.assign(polytope.n, 0.0);

    // PU-rate balance: q_b P_D sum r_p(s,i) q(s,i|b)
    //                + q_b (1-P_D) r_p(0) sum_s q(s,0|e) = lambda_p.
    {
        std::vector<double> row(polytope.n, 0.0);
        for (std::size_t s = 0; s < params.num_sus(); ++s) {
            for (std::size_t i = 0; i < params.num_levels(s); ++i)
                row[lay.busy(s, i)] = q_b * pd * params.coop_success[s][i];
            row[lay.idle(s, 0)] = q_b * (1.0 - pd) * params.solo_success;
        }
        polytope.a_eq.push_back(std::move(row));
        polytope.b_eq.push_back(lambda_p);
    }
    // Each conditional table is a distribution of its own.
    {
        std::vector<double> idle_row(polytope.n, 0.0), busy_row(polytope.n, 0.0);
        for (std::size_t s = 0; s < params.num_sus(); ++s)
            for (std::size_t i = 0; i < params.num_levels(s); ++i) {
                idle_row[lay.idle(s, i)] = 1.0;
                busy_row[lay.busy(s, i)] = 1.0;
            }
        polytope.a_eq.push_back(std::move(idle_row));
        polytope.b_eq.push_back(1.0);
        polytope.a_eq.push_back(std::move(busy_row));
        polytope.b_eq.push_back(1.0);
    }
    // Mixed power rows: the busy table is used in sensed-busy slots, the
    // idle table in the rest, whatever the channel truth.
    for (std::size_t s = 0; s < params.num_sus(); ++s) {
        std::vector<double> row(polytope.n, 0.0);
        for (std::size_t i = 0; i < params.num_levels(s); ++i) {
            row[lay.busy(s, i)] = busy_weight * params.power_levels[s][i];
            row[lay.idle(s, i)] = (1.0 - busy_weight) * params.power_levels[s][i];
        }
        polytope.a_ub.push_back(std::move(row));
        polytope.b_ub.push_back(params.power_budget[s]);
    }

    const std::size_t nsu = params.num_sus();
    GResult out;
    auto finish = [&](const std::vector<double>& x, std::size_t iters) {
        ConditionalPolicy pol;
        pol.busy_prob = q_b;
        pol.idle_prob = q_e;
        const JointPolicy tables = lay.unflatten(params, x);  // conditional tables here
        pol.cond_idle = tables.q_e;
        pol.cond_busy = tables.q_b;
        std::vector<double> rates(nsu, 0.0);
        for (std::size_t s = 0; s < nsu; ++s)
            for (std::size_t i = 0; i < params.num_levels(s); ++i)
                rates[s] += idle_factor * params.su_success[s][i] * pol.cond_idle[s][i];
        out.feasible = true;
        out.value = objective.value(rates);
        out.policy = std::move(pol);
        out.iterations = iters;
    };

    if (objective.kind == Objective::Kind::weighted_sum) {
        LpProblem lp = polytope;
        for (std::size_t s = 0; s < nsu; ++s)
            for (std::size_t i = 0; i < params.num_levels(s); ++i)
                lp.c[lay.idle(s, i)] = objective.weights[s] * idle_factor * params.su_success[s][i];
        const LpSolution sol = solve_lp(lp);
        if (sol.status != LpStatus::optimal) return out;
        finish(sol.x, sol.iterations);
        return out;
    }

    // Concave utility over the fixed-q_b polytope.
    std::vector<double> r(nsu);
    auto value_grad = [&](const std::vector<double>& x, std::vector<double>& g) {
        std::fill(r.begin(), r.end(), 0.0);
        for (std::size_t s = 0; s < nsu; ++s)
            for (std::size_t i = 0; i < params.num_levels(s); ++i)
                r[s] += idle_factor * params.su_success[s][i] * x[lay.idle(s, i)];
        std::fill(g.begin(), g.end(), 0.0);
        double v = 0.0;
        for (std::size_t s = 0; s < nsu; ++s) {
            v += std::log(objective.delta + r[s]);
            const double du = 1.0 / (objective.delta + r[s]);
            for (std::size_t i = 0; i < params.num_levels(s); ++i)
                g[lay.idle(s, i)] += du * idle_factor * params.su_success[s][i];
        }
        return v;
    };
    try {
        double gap = 0.0;
        std::size_t iters = 0;
        const std::vector<double> x = opt_detail::frank_wolfe(polytope, value_grad, 1e-6, 100000, &gap, &iters);
        finish(x, iters);
    } catch (const std::invalid_argument&) {
        // infeasible at this q_b
    }
    return out;
}

SensingSolveReport solve_sensing(const SystemParams& params, const SensingModel& sensing,
                              const Objective& objective, const SensingSearch& search) {
    SensingSolveReport rep;
    const QbInterval box = qb_bounds(params, sensing);
    if (box.empty) return rep;

    auto g = [&](double qb) { return solve_at_busy_prob(params, sensing, qb, objective); };

    const double width = box.hi - box.lo;
    const std::size_t m = std::max<std::size_t>(search.grid_points, 3);
    double best_qb = std::numeric_limits<double>::quiet_NaN();
    GResult best;

    auto consider = [&](double qb, const GResult& r) {
        if (r.feasible && (!best.feasible || r.value > best.value)) {
            best = r;
            best_qb = qb;
        }
    };

    if (search.mode == SensingSearch::Mode::grid || width <= 0.0) {
        std::vector<double> qs(m);
        for (std::size_t k = 0; k < m; ++k)
            qs[k] = m == 1 ? box.lo : box.lo + width * static_cast<double>(k) / static_cast<double>(m - 1);
        std::size_t best_k = m;
        for (std::size_t k = 0; k < m; ++k) {
            const GResult r = g(qs[k]);
            rep.curve.push_back(CurvePoint{qs[k], r.feasible, r.feasible ? r.value : 0.0});
            if (r.feasible && (best_k == m || r.value > best.value)) best_k = k;
            consider(qs[k], r);
        }
        // Midpoint-concavity audit on equispaced feasible triples.
        for (std::size_t k = 0; k + 2 < rep.curve.size(); ++k) {
            const auto &a = rep.curve[k], &b = rep.curve[k + 1], &c = rep.curve[k + 2];
            if (!a.feasible || !b.feasible || !c.feasible) continue;
            ++rep.concavity_triples;
            if (b.value < 0.5 * (a.value + c.value) - 1e-9) ++rep.concavity_violations;
        }
        // Golden-section polish inside the winning bracket; every probe is a
        // true g evaluation, so the result can only improve on the grid max.
        if (best.feasible && width > 0.0 && m >= 2) {
            const std::size_t k = best_k;
            double lo = qs[k == 0 ? 0 : k - 1];
            double hi = qs[std::min(m - 1, k + 1)];
            const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
            GResult g1 = g(x1), g2 = g(x2);
            consider(x1, g1);
            consider(x2, g2);
            for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
                const double v1 = g1.feasible ? g1.value : -std::numeric_limits<double>::infinity();
                const double v2 = g2.feasible ? g2.value : -std::numeric_limits<double>::infinity();
                if (v1 < v2) {
                    lo = x1;
                    x1 = x2;
                    g1 = g2;
                    x2 = lo + phi * (hi - lo);
                    g2 = g(x2);
                    consider(x2, g2);
                } else {
                    hi = x2;
                    x2 = x1;
                    g2 = g1;
                    x1 = hi - phi * (hi - lo);
                    g1 = g(x1);
                    consider(x1, g1);
                }
            }
        }
    } else {
        // Ternary search under the (audited) unimodality assumption.
        double lo = box.lo, hi = box.hi;
        const GResult glo = g(lo), ghi = g(hi);
        rep.curve.push_back(CurvePoint{lo, glo.feasible, glo.feasible ? glo.value : 0.0});
        rep.curve.push_back(CurvePoint{hi, ghi.feasible, ghi.feasible ? ghi.value : 0.0});
        consider(lo, glo);
        consider(hi, ghi);
        while (hi - lo > search.eps_qb) {
            const double x1 = lo + (hi - lo) / 3.0;
            const double x2 = hi - (hi - lo) / 3.0;
            const GResult g1 = g(x1), g2 = g(x2);
            rep.curve.push_back(CurvePoint{x1, g1.feasible, g1.feasible ? g1.value : 0.0});
            rep.curve.push_back(CurvePoint{x2, g2.feasible, g2.feasible ? g2.value : 0.0});
            consider(x1, g1);
            consider(x2, g2);
            const double v1 = g1.feasible ? g1.value : -std::numeric_limits<double>::infinity();
            const double v2 = g2.feasible ? g2.value : -std::numeric_limits<double>::infinity();
            if (v1 < v2)
                lo = x1;
            else
                hi = x2;
        }
        std::sort(rep.curve.begin(), rep.curve.end(),
                  [](const CurvePoint& a, const CurvePoint& b) { return a.q_b < b.q_b; });
    }

    if (!best.feasible) return rep;  // admissible interval, yet every sample infeasible
    rep.status = SolveStatus::optimal;
    rep.q_b_star = best_qb;
    rep.value = best.value;
    rep.policy = best.policy;
    return rep;
}

}  // namespace coopcr
