#include "coopcr/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coopcr/layout.hpp"

namespace coopcr {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::not_converged: return "not_converged";
    }
    return "?";
}

namespace opt_detail {

LpProblem policy_constraints(const SystemParams& p, double lambda_p) {
    VarLayout lay(p);
    LpProblem lp;
    lp.n = lay.size();
    lp.c.assign(lp.n, 0.0);

    std::vector<double> service(lp.n, 0.0);
    for (std::size_t s = 0; s < p.num_sus(); ++s)
        for (std::size_t i = 0; i < p.num_levels(s); ++i)
            service[lay.busy(s, i)] = p.coop_success[s][i];
    lp.a_eq.push_back(std::move(service));
    lp.b_eq.push_back(lambda_p);

    lp.a_eq.emplace_back(lp.n, 1.0);  // total probability mass
    lp.b_eq.push_back(1.0);

    for (std::size_t s = 0; s < p.num_sus(); ++s) {
        std::vector<double> row(lp.n, 0.0);
        for (std::size_t i = 0; i < p.num_levels(s); ++i) {
            row[lay.idle(s, i)] = p.power_levels[s][i];
            row[lay.busy(s, i)] = p.power_levels[s][i];
        }
        lp.a_ub.push_back(std::move(row));
        lp.b_ub.push_back(p.power_budget[s]);
    }
    return lp;
}

namespace {

struct Vertex {
    std::vector<double> x;
    double weight = 0.0;
};

bool same_point(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::fabs(a[i] - b[i]) > 1e-12) return false;
    return true;
}

std::vector<double> lmo(const LpProblem& polytope, const std::vector<double>& direction, bool* ok) {
    LpProblem lp = polytope;
    lp.c = direction;
    const LpSolution s = solve_lp(lp);
    *ok = s.status == LpStatus::optimal;
    return s.x;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) v += a[i] * b[i];
    return v;
}

}  // namespace

std::vector<double> frank_wolfe(
    const LpProblem& polytope,
    const std::function<double(const std::vector<double>&, std::vector<double>&)>& value_grad,
    double gap_tol, std::size_t max_iters, double* gap_out, std::size_t* iters_out) {
    const std::size_t n = polytope.n;
    bool ok = false;
    std::vector<double> x = lmo(polytope, std::vector<double>(n, 0.0), &ok);
    if (!ok) throw std::invalid_argument("frank_wolfe: empty feasible set");

    std::vector<Vertex> active{{x, 1.0}};
    std::vector<double> grad(n), probe_grad(n);
    double gap = std::numeric_limits<double>::infinity();
    std::size_t k = 0;

    for (; k < max_iters; ++k) {
        value_grad(x, grad);
        const std::vector<double> v = lmo(polytope, grad, &ok);
        if (!ok) throw std::runtime_error("frank_wolfe: oracle failed");
        std::vector<double> d_fw(n);
        for (std::size_t i = 0; i < n; ++i) d_fw[i] = v[i] - x[i];
        gap = dot(grad, d_fw);
        if (gap <= gap_tol) break;

        // Worst active vertex gives the away direction.
        std::size_t worst = 0;
        double worst_val = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < active.size(); ++a) {
            const double val = dot(grad, active[a].x);
            if (val < worst_val) { worst_val = val; worst = a; }
        }
        std::vector<double> d_aw(n);
        for (std::size_t i = 0; i < n; ++i) d_aw[i] = x[i] - active[worst].x[i];
        const double away_progress = dot(grad, d_aw);

        const bool use_away = away_progress > gap && active.size() > 1;
        const std::vector<double>& d = use_away ? d_aw : d_fw;
        const double gamma_max =
            use_away ? active[worst].weight / (1.0 - active[worst].weight + 1e-300) : 1.0;

        // Exact line search: the directional derivative of a concave
        // objective is nonincreasing, so bisect on its sign.
        double gamma = gamma_max;
        {
            std::vector<double> probe(n);
            auto dphi = [&](double t) {
                for (std::size_t i = 0; i < n; ++i) probe[i] = x[i] + t * d[i];
                value_grad(probe, probe_grad);
                return dot(probe_grad, d);
            };
            if (dphi(gamma_max) < 0.0) {
                double lo = 0.0, hi = gamma_max;
                for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (dphi(mid) >= 0.0 ? lo : hi) = mid;
                }
                gamma = 0.5 * (lo + hi);
            }
        }
        if (gamma <= 0.0) break;  // numerically stalled

        if (use_away) {
            for (auto& a : active) a.weight *= 1.0 + gamma;
            active[worst].weight -= gamma;
        } else {
            for (auto& a : active) a.weight *= 1.0 - gamma;
            std::size_t hit = active.size();
            for (std::size_t a = 0; a < active.size(); ++a)
                if (same_point(active[a].x, v)) { hit = a; break; }
            if (hit == active.size())
                active.push_back(Vertex{v, gamma});
            else
                active[hit].weight += gamma;
        }
        active.erase(std::remove_if(active.begin(), active.end(),
                                    [](const Vertex& a) { return a.weight <= 1e-14; }),
                     active.end());

        // Re-express x from the weights to stop drift from accumulating.
        std::fill(x.begin(), x.end(), 0.0);
        double wsum = 0.0;
        for (const auto& a : active) {
            wsum += a.weight;
            for (std::size_t i = 0; i < n; ++i) x[i] += a.weight * a.x[i];
        }
        if (std::fabs(wsum - 1.0) > 1e-9)
            for (double& xi : x) xi /= wsum;
    }

    if (gap_out) *gap_out = gap;
    if (iters_out) *iters_out = k;
    return x;
}

}  // namespace opt_detail

namespace {

using opt_detail::frank_wolfe;
using opt_detail::policy_constraints;

SolveReport report_from_point(const SystemParams& params, const Objective& obj, const VarLayout& lay,
                              const std::vector<double>& x, std::size_t iterations) {
    SolveReport rep;
    rep.status = SolveStatus::optimal;
    rep.policy = lay.unflatten(params, x);
    rep.su_rate = su_rates(rep.policy, params);
    rep.su_power = avg_power(rep.policy, params);
    rep.objective = obj.value(rep.su_rate);
    rep.iterations = iterations;
    return rep;
}

// Shared driver: optimize `objective` over the rows of `polytope`, where the
// first layout.size() variables are the policy blocks. `rate_of` maps a full
// variable vector to the per-SU quantity the utility acts on (offered rate,
// or the auxiliary delivered throughput).
SolveReport drive(const SystemParams& params, const Objective& obj, const LpProblem& polytope,
                  const VarLayout& lay,
                  const std::function<void(const std::vector<double>&, std::vector<double>&)>& rate_of,
                  const std::function<void(std::vector<double>&, const std::vector<double>&)>& chain_grad) {
    const std::size_t nsu = params.num_sus();
    const Objective::Kind family = obj.kind == Objective::Kind::saturated ? obj.inner : obj.kind;

    if (family == Objective::Kind::weighted_sum) {
        // Linear utility: chain the weights through the rate map once.
        LpProblem lp = polytope;
        std::vector<double> unit(polytope.n, 0.0);
        chain_grad(unit, obj.weights);
        lp.c = unit;
        const LpSolution s = solve_lp(lp);
        if (s.status != LpStatus::optimal) {
            SolveReport rep;
            rep.status = s.status == LpStatus::infeasible ? SolveStatus::infeasible : SolveStatus::unbounded;
            rep.iterations = s.iterations;
            return rep;
        }
        SolveReport rep = report_from_point(params, obj, lay, s.x, s.iterations);
        return rep;
    }

    // Smooth concave path.
    std::vector<double> r(nsu), du(nsu);
    auto value_grad = [&](const std::vector<double>& x, std::vector<double>& g) {
        rate_of(x, r);
        double v = 0.0;
        for (std::size_t s = 0; s < nsu; ++s) {
            v += std::log(obj.delta + r[s]);
            du[s] = 1.0 / (obj.delta + r[s]);
        }
        std::fill(g.begin(), g.end(), 0.0);
        chain_grad(g, du);
        return v;
    };
    double gap = 0.0;
    std::size_t iters = 0;
    std::vector<double> x;
    try {
        x = frank_wolfe(polytope, value_grad, 1e-6, 100000, &gap, &iters);
    } catch (const std::invalid_argument&) {
        SolveReport rep;
        rep.status = SolveStatus::infeasible;
        return rep;
    }
    SolveReport rep = report_from_point(params, obj, lay, x, iters);
    if (gap > 1e-6) rep.status = SolveStatus::not_converged;
    return rep;
}

}  // namespace

SolveReport solve_policy(const SystemParams& params, const Objective& objective) {
    require_valid(params);
    objective.check(params.num_sus());
    if (objective.kind == Objective::Kind::saturated)
        return solve_throughput(params, objective.caps,
                                objective.inner == Objective::Kind::weighted_sum
                                    ? Objective::weighted(objective.weights)
                                    : Objective::log_utility_of(params.num_sus(), objective.delta));

    const VarLayout lay(params);
    const LpProblem polytope = policy_constraints(params, params.pu_arrival_rate);

    auto rate_of = [&params, &lay](const std::vector<double>& x, std::vector<double>& r) {
        std::fill(r.begin(), r.end(), 0.0);
        for (std::size_t s = 0; s < params.num_sus(); ++s)
            for (std::size_t i = 0; i < params.num_levels(s); ++i)
                r[s] += params.su_success[s][i] * x[lay.idle(s, i)];
    };
    auto chain_grad = [&params, &lay](std::vector<double>& g, const std::vector<double>& du) {
        for (std::size_t s = 0; s < params.num_sus(); ++s)
            for (std::size_t i = 0; i < params.num_levels(s); ++i)
                g[lay.idle(s, i)] += du[s] * params.su_success[s][i];
    };
    return drive(params, objective, polytope, lay, rate_of, chain_grad);
}

SolveReport solve_throughput(const SystemParams& params, const std::vector<double>& su_arrival_rate,
                             const Objective& objective) {
    require_valid(params);
    objective.check(params.num_sus());
    if (objective.kind == Objective::Kind::saturated)
        throw std::invalid_argument("solve_throughput: pass the inner objective; caps come from arrivals");
    if (su_arrival_rate.size() != params.num_sus())
        throw std::invalid_argument("solve_throughput: arrival vector dimension mismatch");
    for (double a : su_arrival_rate)
        if (a < 0.0 || !std::isfinite(a)) throw std::invalid_argument("solve_throughput: bad arrival rate");

    const std::size_t nsu = params.num_sus();
    const VarLayout lay(params);

    // Policy variables first, then one delivered-throughput variable per SU
    // with R_s <= arrival_s and R_s <= offered rate_s.
    LpProblem polytope = policy_constraints(params, params.pu_arrival_rate);
    const std::size_t base = polytope.n;
    polytope.n += nsu;
    polytope.c.assign(polytope.n, 0.0);
    for (auto& row : polytope.a_eq) row.resize(polytope.n, 0.0);
    for (auto& row : polytope.a_ub) row.resize(polytope.n, 0.0);
    for (std::size_t s = 0; s < nsu; ++s) {
        std::vector<double> cap_row(polytope.n, 0.0);
        cap_row[base + s] = 1.0;
        polytope.a_ub.push_back(std::move(cap_row));
        polytope.b_ub.push_back(su_arrival_rate[s]);

        std::vector<double> offer_row(polytope.n, 0.0);
        offer_row[base + s] = 1.0;
        for (std::size_t i = 0; i < params.num_levels(s); ++i)
            offer_row[lay.idle(s, i)] = -params.su_success[s][i];
        polytope.a_ub.push_back(std::move(offer_row));
        polytope.b_ub.push_back(0.0);
    }

    auto rate_of = [base, nsu](const std::vector<double>& x, std::vector<double>& r) {
        for (std::size_t s = 0; s < nsu; ++s) r[s] = x[base + s];
    };
    auto chain_grad = [base, nsu](std::vector<double>& g, const std::vector<double>& du) {
        for (std::size_t s = 0; s < nsu; ++s) g[base + s] += du[s];
    };

    SolveReport rep = drive(params, objective, polytope, lay, rate_of, chain_grad);
    if (rep.status != SolveStatus::optimal && rep.status != SolveStatus::not_converged) return rep;

    rep.throughput.assign(nsu, 0.0);
    rep.admission.assign(nsu, 1.0);
    for (std::size_t s = 0; s < nsu; ++s) {
        rep.throughput[s] = std::min(su_arrival_rate[s], rep.su_rate[s]);
        if (su_arrival_rate[s] > 0.0) rep.admission[s] = rep.throughput[s] / su_arrival_rate[s];
    }
    // Utility of the delivered throughputs, not of the raw offered rates.
    Objective capped = Objective::saturated_of(objective, su_arrival_rate);
    rep.objective = capped.value(rep.su_rate);
    return rep;
}

}  // namespace coopcr
