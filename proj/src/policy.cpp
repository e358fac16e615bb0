#include "coopcr/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace coopcr {

double table_sum(const LevelTable& t) {
    double s = 0.0;
    for (const auto& row : t)
        for (double v : row) s += v;
    return s;
}

LevelTable zero_table_like(const SystemParams& params) {
    LevelTable t(params.num_sus());
    for (std::size_t s = 0; s < params.num_sus(); ++s) t[s].assign(params.num_levels(s), 0.0);
    return t;
}

namespace {

bool same_shape(const LevelTable& a, const LevelTable& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t s = 0; s < a.size(); ++s)
        if (a[s].size() != b[s].size()) return false;
    return true;
}

void check_nonneg(const LevelTable& t, const char* name, std::vector<std::string>& out) {
    for (std::size_t s = 0; s < t.size(); ++s)
        for (std::size_t i = 0; i < t[s].size(); ++i)
            if (t[s][i] < -kPolicyTol || !std::isfinite(t[s][i]))
                out.push_back(std::string(name) + " negative or non-finite at (" + std::to_string(s) +
                              "," + std::to_string(i) + ")");
}

void require_shape(const LevelTable& t, const SystemParams& params, const char* what) {
    if (t.size() != params.num_sus()) throw std::invalid_argument(std::string(what) + ": user count mismatch");
    for (std::size_t s = 0; s < t.size(); ++s)
        if (t[s].size() != params.num_levels(s))
            throw std::invalid_argument(std::string(what) + ": level count mismatch for su " + std::to_string(s));
}

}  // namespace

std::vector<std::string> check_policy(const JointPolicy& p) {
    std::vector<std::string> out;
    if (!same_shape(p.q_e, p.q_b)) {
        out.push_back("q_e and q_b shapes differ");
        return out;
    }
    check_nonneg(p.q_e, "q_e", out);
    check_nonneg(p.q_b, "q_b", out);
    const double total = table_sum(p.q_e) + table_sum(p.q_b);
    if (std::fabs(total - 1.0) > kPolicyTol)
        out.push_back("total mass " + std::to_string(total) + " != 1");
    return out;
}

std::vector<std::string> check_policy(const ConditionalPolicy& p) {
    std::vector<std::string> out;
    if (!same_shape(p.cond_busy, p.cond_idle)) {
        out.push_back("cond_busy and cond_idle shapes differ");
        return out;
    }
    if (p.busy_prob < -kPolicyTol || p.busy_prob > 1.0 + kPolicyTol) out.push_back("busy_prob outside [0,1]");
    if (std::fabs(p.busy_prob + p.idle_prob - 1.0) > kPolicyTol) out.push_back("busy_prob + idle_prob != 1");
    check_nonneg(p.cond_busy, "cond_busy", out);
    check_nonneg(p.cond_idle, "cond_idle", out);
    // All-zero tables are the degenerate convention for a zero-probability state.
    const double sb = table_sum(p.cond_busy);
    const double se = table_sum(p.cond_idle);
    if (std::fabs(sb - 1.0) > kPolicyTol && std::fabs(sb) > kPolicyTol)
        out.push_back("cond_busy sums to " + std::to_string(sb));
    if (std::fabs(se - 1.0) > kPolicyTol && std::fabs(se) > kPolicyTol)
        out.push_back("cond_idle sums to " + std::to_string(se));
    return out;
}

std::vector<std::string> check_policy(const RelaxedPolicy& p) {
    std::vector<std::string> out;
    if (!same_shape(p.assist, p.own)) {
        out.push_back("assist and own shapes differ");
        return out;
    }
    check_nonneg(p.assist, "assist", out);
    check_nonneg(p.own, "own", out);
    const double total = table_sum(p.assist) + table_sum(p.own);
    if (std::fabs(total - 1.0) > kPolicyTol)
        out.push_back("total mass " + std::to_string(total) + " != 1");
    return out;
}

JointPolicy to_joint(const ConditionalPolicy& cond) {
    const auto issues = check_policy(cond);
    if (!issues.empty()) throw std::invalid_argument("to_joint: invalid policy: " + issues.front());
    JointPolicy j;
    j.q_e = cond.cond_idle;
    j.q_b = cond.cond_busy;
    for (auto& row : j.q_e)
        for (double& v : row) v *= cond.idle_prob;
    for (auto& row : j.q_b)
        for (double& v : row) v *= cond.busy_prob;
    return j;
}

ConditionalPolicy to_conditional(const JointPolicy& joint) {
    const auto issues = check_policy(joint);
    if (!issues.empty()) throw std::invalid_argument("to_conditional: invalid policy: " + issues.front());
    ConditionalPolicy c;
    c.busy_prob = table_sum(joint.q_b);
    c.idle_prob = table_sum(joint.q_e);
    c.cond_busy = joint.q_b;
    c.cond_idle = joint.q_e;
    if (c.busy_prob > 0.0) {
        for (auto& row : c.cond_busy)
            for (double& v : row) v /= c.busy_prob;
    } else {
        for (auto& row : c.cond_busy)
            for (double& v : row) v = 0.0;
    }
    if (c.idle_prob > 0.0) {
        for (auto& row : c.cond_idle)
            for (double& v : row) v /= c.idle_prob;
    } else {
        for (auto& row : c.cond_idle)
            for (double& v : row) v = 0.0;
    }
    return c;
}

std::vector<double> su_rates(const JointPolicy& p, const SystemParams& params) {
    require_shape(p.q_e, params, "su_rates");
    std::vector<double> r(params.num_sus(), 0.0);
    for (std::size_t s = 0; s < params.num_sus(); ++s)
        for (std::size_t i = 0; i < params.num_levels(s); ++i)
            r[s] += params.su_success[s][i] * p.q_e[s][i];
    return r;
}

std::vector<double> su_rates(const ConditionalPolicy& p, const SystemParams& params) {
    require_shape(p.cond_idle, params, "su_rates");
    std::vector<double> r(params.num_sus(), 0.0);
    for (std::size_t s = 0; s < params.num_sus(); ++s) {
        double v = 0.0;
        for (std::size_t i = 0; i < params.num_levels(s); ++i)
            v += params.su_success[s][i] * p.cond_idle[s][i];
        r[s] = v * p.idle_prob;
    }
    return r;
}

double pu_service_rate(const ConditionalPolicy& p, const SystemParams& params) {
    require_shape(p.cond_busy, params, "pu_service_rate");
    double r = 0.0;
    for (std::size_t s = 0; s < params.num_sus(); ++s)
        for (std::size_t i = 0; i < params.num_levels(s); ++i)
            r += params.coop_success[s][i] * p.cond_busy[s][i];
    return r;
}

std::vector<double> avg_power(const JointPolicy& p, const SystemParams& params) {
    require_shape(p.q_e, params, "avg_power");
    std::vector<double> w(params.num_sus(), 0.0);
    for (std::size_t s = 0; s < params.num_sus(); ++s)
        for (std::size_t i = 0; i < params.num_levels(s); ++i)
            w[s] += params.power_levels[s][i] * (p.q_e[s][i] + p.q_b[s][i]);
    return w;
}

std::vector<double> avg_power(const ConditionalPolicy& p, const SystemParams& params) {
    require_shape(p.cond_busy, params, "avg_power");
    std::vector<double> w(params.num_sus(), 0.0);
    for (std::size_t s = 0; s < params.num_sus(); ++s) {
        double busy = 0.0, idle = 0.0;
        for (std::size_t i = 0; i < params.num_levels(s); ++i) {
            busy += params.power_levels[s][i] * p.cond_busy[s][i];
            idle += params.power_levels[s][i] * p.cond_idle[s][i];
        }
        w[s] = p.busy_prob * busy + p.idle_prob * idle;
    }
    return w;
}

}  // namespace coopcr
