#include "coopcr/admm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coopcr {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) v += a[i] * b[i];
    return v;
}

double sum(const std::vector<double>& a) {
    double v = 0.0;
    for (double x : a) v += x;
    return v;
}

/// min over v >= 0 of  lin.v + (rho/2) sum_j (a_j.v + b_j)^2 - f(r.v)
/// with f concave nondecreasing (absent when r is empty). Projected
/// gradient with a spectral step and Armijo backtracking; the penalty terms
/// make the objective coercive on the orthant, so a minimizer exists.
struct ProxProblem {
    std::vector<double> lin;
    std::vector<std::pair<const std::vector<double>*, double>> quad;  // (a_j, b_j)
    double rho = 0.1;
    const std::vector<double>* rate = nullptr;  // r for the -f(r.v) term
    NodeUtility f;
};

constexpr double kProxTol = 1e-10;

double prox_value(const ProxProblem& p, const std::vector<double>& v) {
    double val = dot(p.lin, v);
    for (const auto& [a, b] : p.quad) {
        const double t = dot(*a, v) + b;
        val += 0.5 * p.rho * t * t;
    }
    if (p.rate) val -= p.f.value(dot(*p.rate, v));
    return val;
}

void prox_grad(const ProxProblem& p, const std::vector<double>& v, std::vector<double>& g) {
    g = p.lin;
    for (const auto& [a, b] : p.quad) {
        const double t = p.rho * (dot(*a, v) + b);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += t * (*a)[i];
    }
    if (p.rate) {
        const double s = p.f.slope(dot(*p.rate, v));
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= s * (*p.rate)[i];
    }
}

double stationarity(const std::vector<double>& v, const std::vector<double>& g) {
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        m = std::max(m, v[i] > 0.0 ? std::fabs(g[i]) : std::max(0.0, -g[i]));
    return m;
}

std::vector<double> solve_prox(const ProxProblem& p, std::vector<double> v) {
    const std::size_t n = v.size();
    std::vector<double> g(n), v_next(n), g_prev(n), v_prev(n);
    double step = 1.0;
    prox_grad(p, v, g);
    double fv = prox_value(p, v);

    for (std::size_t it = 0; it < 200000; ++it) {
        if (stationarity(v, g) <= kProxTol) break;

        if (it > 0) {  // Barzilai-Borwein spectral step
            double sy = 0.0, ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double s = v[i] - v_prev[i];
                sy += s * (g[i] - g_prev[i]);
                ss += s * s;
            }
            if (sy > 1e-300) step = ss / sy;
            step = std::clamp(step, 1e-12, 1e12);
        }

        double t = step;
        double fn = 0.0;
        for (int back = 0; back < 60; ++back) {
            double decrease = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                v_next[i] = std::max(0.0, v[i] - t * g[i]);
                decrease += g[i] * (v[i] - v_next[i]);
            }
            fn = prox_value(p, v_next);
            if (fn <= fv - 1e-4 * decrease + 1e-300) break;
            t *= 0.5;
        }
        v_prev = v;
        g_prev = g;
        v = v_next;
        fv = fn;
        prox_grad(p, v, g);
    }
    return v;
}

}  // namespace

NodeParams node_params(const SystemParams& params, std::size_t s) {
    return NodeParams{params.power_levels[s], params.su_success[s], params.coop_success[s],
                      params.power_budget[s]};
}

double NodeUtility::value(double r) const {
    return kind == Objective::Kind::weighted_sum ? weight * r : std::log(delta + r);
}

double NodeUtility::slope(double r) const {
    return kind == Objective::Kind::weighted_sum ? weight : 1.0 / (delta + r);
}

std::size_t BroadcastLog::data_count(std::uint32_t iteration) const {
    std::size_t n = 0;
    for (const auto& m : messages)
        if (m.iteration == iteration && m.kind != BroadcastMessage::Kind::convergence) ++n;
    return n;
}

std::vector<double> update_idle_block(const NodeParams& node, const NodeUtility& f,
                                      const SharedDuals& duals, double power_dual,
                                      const std::vector<double>& start,
                                      const std::vector<double>& busy_current, double slack_current,
                                      double mass_rest) {
    const std::size_t n = node.power.size();
    ProxProblem p;
    p.rho = duals.rho;
    p.lin.assign(n, duals.mass_dual);
    for (std::size_t i = 0; i < n; ++i) p.lin[i] += power_dual * node.power[i];
    const double power_rest = dot(node.power, busy_current) + slack_current - node.budget;
    const std::vector<double> ones(n, 1.0);
    p.quad.push_back({&node.power, power_rest});
    p.quad.push_back({&ones, mass_rest});
    p.rate = &node.su_success;
    p.f = f;
    return solve_prox(p, start);
}

std::vector<double> update_busy_block(const NodeParams& node, const SharedDuals& duals,
                                      double power_dual, const std::vector<double>& start,
                                      const std::vector<double>& idle_new, double slack_current,
                                      double rate_rest, double mass_rest) {
    const std::size_t n = node.power.size();
    ProxProblem p;
    p.rho = duals.rho;
    p.lin.assign(n, duals.mass_dual);
    for (std::size_t i = 0; i < n; ++i)
        p.lin[i] += duals.rate_dual * node.coop_success[i] + power_dual * node.power[i];
    const double power_rest = dot(node.power, idle_new) + slack_current - node.budget;
    const std::vector<double> ones(n, 1.0);
    p.quad.push_back({&node.power, power_rest});
    p.quad.push_back({&node.coop_success, rate_rest});
    p.quad.push_back({&ones, mass_rest});
    return solve_prox(p, start);
}

double update_slack(double budget, double powerload, double power_dual, double rho) {
    return std::max(0.0, budget - powerload - power_dual / rho);
}

AdmmState admm_cold_start(const SystemParams& params, const AdmmOptions& options) {
    AdmmState st;
    st.duals = SharedDuals{1.0, 1.0, options.rho};
    st.nodes.resize(params.num_sus());
    for (std::size_t s = 0; s < params.num_sus(); ++s) {
        auto& n = st.nodes[s];
        n.idle.assign(params.num_levels(s), 0.01);
        n.busy.assign(params.num_levels(s), 0.03);
        n.power_dual = 1.0;
        double load = 0.0;
        for (std::size_t i = 0; i < params.num_levels(s); ++i)
            load += params.power_levels[s][i] * (n.idle[i] + n.busy[i]);
        n.slack = std::max(0.0, params.power_budget[s] - load);
    }
    return st;
}

AdmmResult admm_solve(const SystemParams& params, const Objective& objective,
                      const AdmmOptions& options, const AdmmState* warm_start) {
    require_valid(params);
    objective.check(params.num_sus());
    if (objective.kind == Objective::Kind::saturated)
        throw std::invalid_argument(
            "admm: saturated objectives are centralized-only; use solve_throughput");
    if (!(options.rho > 0.0) || !(options.epsilon > 0.0))
        throw std::invalid_argument("admm: rho and epsilon must be positive");

    const std::size_t nsu = params.num_sus();
    const double lambda_p = params.pu_arrival_rate;

    std::vector<NodeParams> nodes;
    std::vector<NodeUtility> f(nsu);
    for (std::size_t s = 0; s < nsu; ++s) {
        nodes.push_back(node_params(params, s));
        f[s].kind = objective.kind;
        f[s].weight = objective.weights[s];
        f[s].delta = objective.delta;
    }

    AdmmResult res;
    AdmmState st = warm_start ? *warm_start : admm_cold_start(params, options);
    st.duals.rho = options.rho;
    if (st.nodes.size() != nsu) throw std::invalid_argument("admm: warm start has wrong node count");
    for (std::size_t s = 0; s < nsu; ++s)
        if (st.nodes[s].idle.size() != params.num_levels(s) ||
            st.nodes[s].busy.size() != params.num_levels(s))
            throw std::invalid_argument("admm: warm start has wrong block sizes");

    std::vector<double> f_prev(nsu);
    for (std::size_t s = 0; s < nsu; ++s)
        f_prev[s] = f[s].value(dot(nodes[s].su_success, st.nodes[s].idle));
    std::vector<char> announced(nsu, 0);

    std::size_t iter = 0;
    bool converged = false;
    for (; iter < options.max_iterations; ++iter) {
        const auto it32 = static_cast<std::uint32_t>(iter);

        // Idle-block sweep in node order: node s uses the masses broadcast
        // earlier this round plus last round's values for the rest.
        double idle_mass_new = 0.0, idle_mass_old = 0.0, busy_mass_old = 0.0;
        for (std::size_t s = 0; s < nsu; ++s) {
            idle_mass_old += sum(st.nodes[s].idle);
            busy_mass_old += sum(st.nodes[s].busy);
        }
        for (std::size_t s = 0; s < nsu; ++s) {
            auto& n = st.nodes[s];
            const double rest = idle_mass_new + (idle_mass_old - sum(n.idle)) + busy_mass_old - 1.0;
            idle_mass_old -= sum(n.idle);
            n.idle = update_idle_block(nodes[s], f[s], st.duals, n.power_dual, n.idle, n.busy,
                                       n.slack, rest);
            const double mass = sum(n.idle);
            idle_mass_new += mass;
            res.log.messages.push_back(BroadcastMessage{
                it32, static_cast<std::uint16_t>(s), BroadcastMessage::Kind::idle_mass, mass, 0.0});
        }

        // Busy-block sweep, same discipline for the rate and mass sums.
        double busy_rate_new = 0.0, busy_rate_old = 0.0, busy_mass_new = 0.0;
        for (std::size_t s = 0; s < nsu; ++s)
            busy_rate_old += dot(nodes[s].coop_success, st.nodes[s].busy);
        for (std::size_t s = 0; s < nsu; ++s) {
            auto& n = st.nodes[s];
            const double rate_rest =
                busy_rate_new + (busy_rate_old - dot(nodes[s].coop_success, n.busy)) - lambda_p;
            const double mass_rest =
                idle_mass_new + busy_mass_new + (busy_mass_old - sum(n.busy)) - 1.0;
            busy_rate_old -= dot(nodes[s].coop_success, n.busy);
            busy_mass_old -= sum(n.busy);
            n.busy = update_busy_block(nodes[s], st.duals, n.power_dual, n.busy, n.idle, n.slack,
                                       rate_rest, mass_rest);
            const double rate = dot(nodes[s].coop_success, n.busy);
            const double mass = sum(n.busy);
            busy_rate_new += rate;
            busy_mass_new += mass;
            res.log.messages.push_back(BroadcastMessage{
                it32, static_cast<std::uint16_t>(s), BroadcastMessage::Kind::busy_pair, rate, mass});
        }

        // Slack and dual updates run in parallel across nodes.
        double max_residual = 0.0;
        for (std::size_t s = 0; s < nsu; ++s) {
            auto& n = st.nodes[s];
            const double load = dot(nodes[s].power, n.idle) + dot(nodes[s].power, n.busy);
            n.slack = update_slack(nodes[s].budget, load, n.power_dual, st.duals.rho);
            const double h_res = load + n.slack - nodes[s].budget;
            n.power_dual += st.duals.rho * h_res;
            max_residual = std::max(max_residual, std::fabs(h_res));
        }
        const double mass_res = idle_mass_new + busy_mass_new - 1.0;
        const double rate_res = busy_rate_new - lambda_p;
        st.duals.mass_dual += st.duals.rho * mass_res;
        st.duals.rate_dual += st.duals.rho * rate_res;
        max_residual = std::max({max_residual, std::fabs(mass_res), std::fabs(rate_res)});

        // Local convergence flags plus the global residual guard.
        bool all_local = true;
        double obj = 0.0;
        for (std::size_t s = 0; s < nsu; ++s) {
            const double fs = f[s].value(dot(nodes[s].su_success, st.nodes[s].idle));
            obj += fs;
            const bool local = std::fabs(fs - f_prev[s]) < options.epsilon;
            if (local && !announced[s]) {
                announced[s] = 1;
                res.log.messages.push_back(BroadcastMessage{it32, static_cast<std::uint16_t>(s),
                                                            BroadcastMessage::Kind::convergence, 0.0, 0.0});
            }
            if (!local) {
                all_local = false;
                announced[s] = 0;
            }
            f_prev[s] = fs;
        }
        res.residual_trace.push_back(max_residual);
        res.objective_trace.push_back(obj);

        // The residual guard keeps the local-only rule from declaring
        // success at a mutually stalled infeasible point. Coupling it at
        // epsilon (not a multiple) is what makes the assembled policy track
        // the centralized optimum to ~1e-5 at the default accuracy.
        if (all_local) {
            if (max_residual <= options.epsilon) {
                converged = true;
                ++iter;
                break;
            }
            ++res.guard_delays;
        }
    }

    res.iterations = iter;
    res.status = converged ? SolveStatus::optimal : SolveStatus::not_converged;
    res.policy = JointPolicy{zero_table_like(params), zero_table_like(params)};
    for (std::size_t s = 0; s < nsu; ++s)
        for (std::size_t i = 0; i < params.num_levels(s); ++i) {
            res.policy.q_e[s][i] = st.nodes[s].idle[i];
            res.policy.q_b[s][i] = st.nodes[s].busy[i];
        }
    res.su_rate = su_rates(res.policy, params);
    res.su_power = avg_power(res.policy, params);
    res.objective = objective.value(res.su_rate);
    res.state = std::move(st);
    return res;
}

}  // namespace coopcr
