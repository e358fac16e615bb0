#include "coopcr/regions.hpp"

#include <cmath>
#include <stdexcept>

#include "coopcr/layout.hpp"
#include "coopcr/optimizer.hpp"

namespace coopcr {

namespace {

// LP over the busy-mass variables only: one power row per SU plus the
// total-mass row.
LpProblem stability_lp(const SystemParams& p) {
    VarLayout lay(p);
    LpProblem lp;
    lp.n = lay.block;
    lp.c.assign(lp.n, 0.0);
    for (std::size_t s = 0; s < p.num_sus(); ++s)
        for (std::size_t i = 0; i < p.num_levels(s); ++i) lp.c[lay.idle(s, i)] = p.coop_success[s][i];
    for (std::size_t s = 0; s < p.num_sus(); ++s) {
        std::vector<double> row(lp.n, 0.0);
        for (std::size_t i = 0; i < p.num_levels(s); ++i) row[lay.idle(s, i)] = p.power_levels[s][i];
        lp.a_ub.push_back(std::move(row));
        lp.b_ub.push_back(p.power_budget[s]);
    }
    lp.a_ub.emplace_back(lp.n, 1.0);
    lp.b_ub.push_back(1.0);
    return lp;
}

}  // namespace

double max_stable_rate(const SystemParams& params) {
    return max_stable_rate_certificate(params).lambda_hat;
}

StabilityCertificate max_stable_rate_certificate(const SystemParams& params) {
    require_valid(params);
    StabilityCertificate cert;
    cert.lp = solve_lp(stability_lp(params));
    if (cert.lp.status != LpStatus::optimal)
        throw std::runtime_error("stability LP did not solve");  // bounded & feasible by construction
    cert.lambda_hat = cert.lp.objective;
    cert.coop_mass = zero_table_like(params);
    VarLayout lay(params);
    for (std::size_t s = 0; s < params.num_sus(); ++s)
        for (std::size_t i = 0; i < params.num_levels(s); ++i)
            cert.coop_mass[s][i] = cert.lp.x[lay.idle(s, i)];
    return cert;
}

std::vector<RegionPoint> rate_region_boundary(const SystemParams& params, double lambda_p,
                                              const std::vector<std::vector<double>>& directions) {
    require_valid(params);
    std::vector<RegionPoint> points;
    points.reserve(directions.size());
    SystemParams at_rate = params;
    at_rate.pu_arrival_rate = lambda_p;
    for (const auto& w : directions) {
        if (w.size() != params.num_sus()) throw std::invalid_argument("boundary: direction dimension mismatch");
        double norm = 0.0;
        for (double v : w) {
            if (v < 0.0) throw std::invalid_argument("boundary: negative direction component");
            norm += v;
        }
        if (norm <= 0.0) throw std::invalid_argument("boundary: zero direction");
        const SolveReport rep = solve_policy(at_rate, Objective::weighted(w));
        if (rep.status != SolveStatus::optimal)
            throw std::invalid_argument("boundary: arrival rate outside the stability region");
        points.push_back(RegionPoint{w, rep.su_rate, rep.objective});
    }
    return points;
}

RelaxedSolve relaxed_max_weighted_rate(const SystemParams& params, double lambda_p,
                             const std::vector<double>& w) {
    require_valid(params);
    if (w.size() != params.num_sus()) throw std::invalid_argument("relaxed solve: weight dimension mismatch");

    // Variables: [own block | assist block] via the shared layout.
    VarLayout lay(params);
    LpProblem lp;
    lp.n = lay.size();
    lp.c.assign(lp.n, 0.0);
    for (std::size_t s = 0; s < params.num_sus(); ++s)
        for (std::size_t i = 0; i < params.num_levels(s); ++i)
            lp.c[lay.idle(s, i)] = w[s] * params.su_success[s][i];

    // PU stability as an inequality: -sum r_p(s,i) assist(s,i) <= -lambda_p.
    {
        std::vector<double> row(lp.n, 0.0);
        for (std::size_t s = 0; s < params.num_sus(); ++s)
            for (std::size_t i = 0; i < params.num_levels(s); ++i)
                row[lay.busy(s, i)] = -params.coop_success[s][i];
        lp.a_ub.push_back(std::move(row));
        lp.b_ub.push_back(-lambda_p);
    }
    for (std::size_t s = 0; s < params.num_sus(); ++s) {
        std::vector<double> row(lp.n, 0.0);
        for (std::size_t i = 0; i < params.num_levels(s); ++i) {
            row[lay.idle(s, i)] = params.power_levels[s][i];
            row[lay.busy(s, i)] = params.power_levels[s][i];
        }
        lp.a_ub.push_back(std::move(row));
        lp.b_ub.push_back(params.power_budget[s]);
    }
    lp.a_eq.emplace_back(lp.n, 1.0);
    lp.b_eq.push_back(1.0);

    const LpSolution s = solve_lp(lp);
    RelaxedSolve out;
    out.status = s.status;
    if (s.status != LpStatus::optimal) return out;
    out.value = s.objective;
    const JointPolicy as_joint = lay.unflatten(params, s.x);
    out.policy = RelaxedPolicy{as_joint.q_b, as_joint.q_e};  // assist = busy block, own = idle block
    out.rates = su_rates(as_joint, params);
    return out;
}

JointPolicy convert_relaxed_policy(const RelaxedPolicy& p, const SystemParams& params, double lambda_p) {
    require_valid(params);
    {
        const auto issues = check_policy(p);
        if (!issues.empty()) throw std::invalid_argument("convert: invalid policy: " + issues.front());
    }
    const std::size_t n = params.num_sus();
    if (p.assist.size() != n) throw std::invalid_argument("convert: user count mismatch");

    double served = 0.0;   // sum r_p(s,i) assist(s,i)
    double assist_total = 0.0;
    std::vector<double> assist_user(n, 0.0), own_user(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t i = 0; i < params.num_levels(s); ++i) {
            served += params.coop_success[s][i] * p.assist[s][i];
            assist_user[s] += p.assist[s][i];
            own_user[s] += p.own[s][i];
        }
        assist_total += assist_user[s];
    }
    if (served < lambda_p - kPolicyTol)
        throw std::invalid_argument("convert: policy does not serve the PU arrival rate");

    JointPolicy out{p.own, p.assist};
    if (std::fabs(served - lambda_p) <= kPolicyTol) return out;  // already tight

    const double rp0 = params.solo_success;
    const double floor = rp0 * assist_total;  // service if all assistance dropped to level 0

    if (lambda_p >= floor - 1e-12) {
        // Keep the transmit probability, mix assistance toward level 0.
        const double alpha = (lambda_p - floor) / (served - floor);
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t i = 1; i < params.num_levels(s); ++i) out.q_b[s][i] = alpha * p.assist[s][i];
            out.q_b[s][0] = alpha * p.assist[s][0] + (1.0 - alpha) * assist_user[s];
        }
    } else {
        // Even zero-power assistance over-serves: shrink the busy mass to
        // lambda_p / (r_p(0) p(1)) at level 0 and return the surplus to the
        // idle level-0 entries, scaled per SU.
        if (rp0 <= 0.0 || assist_total <= 0.0)
            throw std::invalid_argument("convert: arrival rate unreachable with zero assistance");
        if (assist_total >= 1.0 - 1e-12)
            throw std::invalid_argument("convert: transmit probability 1 cannot be shrunk");
        const double keep = lambda_p / (rp0 * assist_total);
        const double beta = (1.0 - lambda_p / rp0) / (1.0 - assist_total) - 1.0;
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t i = 1; i < params.num_levels(s); ++i) out.q_b[s][i] = 0.0;
            out.q_b[s][0] = keep * assist_user[s];
            out.q_e[s][0] = p.own[s][0] + beta * own_user[s];
        }
    }
    return out;
}

}  // namespace coopcr
