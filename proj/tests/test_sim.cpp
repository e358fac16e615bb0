#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "coopcr/optimizer.hpp"
#include "coopcr/regions.hpp"
#include "coopcr/sim.hpp"
#include "support/instances.hpp"

using namespace coopcr;
using namespace coopcr::testing;

namespace {

ConditionalPolicy reference_policy(const SystemParams& p) {
    const SolveReport rep = solve_policy(p, Objective::sum_rate(p.num_sus()));
    REQUIRE(rep.status == SolveStatus::optimal);
    return to_conditional(rep.policy);
}

ConditionalPolicy no_cooperation_policy(const SystemParams& p) {
    ConditionalPolicy c;
    c.cond_busy = zero_table_like(p);
    c.cond_idle = zero_table_like(p);
    c.cond_busy[0][0] = 1.0;   // PU is left alone
    c.cond_idle[0][4] = 1.0;   // SU 0 uses its best level when idle
    c.busy_prob = 0.5;
    c.idle_prob = 0.5;
    return c;
}

double sum(const std::vector<double>& v) {
    double t = 0.0;
    for (double x : v) t += x;
    return t;
}

}  // namespace

TEST_CASE("an always-idle channel leaves the PU queue empty") {
    SystemParams p = two_su_reference(0.0);
    ConditionalPolicy c = no_cooperation_policy(p);
    SimConfig cfg;
    cfg.horizon = 200000;
    cfg.seed = 5;
    const SimReport rep = simulate(p, c, cfg);
    CHECK(rep.busy_fraction == 0.0);
    CHECK(rep.mean_backlog == 0.0);
    CHECK(rep.pu_arrived == 0);
    // every slot is idle and the table always picks level 4 of SU 0: r_s(4)=1
    CHECK(rep.su_throughput[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.su_throughput[1] == 0.0);
}

TEST_CASE("simulation is reproducible and seed-sensitive") {
    const SystemParams p = five_su_reference(0.3);
    const ConditionalPolicy c = reference_policy(p);
    SimConfig cfg;
    cfg.horizon = 50000;
    cfg.seed = 42;
    const SimReport a = simulate(p, c, cfg);
    const SimReport b = simulate(p, c, cfg);
    CHECK(a.pu_delivered == b.pu_delivered);
    CHECK(a.final_backlog == b.final_backlog);
    for (std::size_t s = 0; s < 5; ++s) CHECK(a.su_throughput[s] == b.su_throughput[s]);
    cfg.seed = 43;
    const SimReport d = simulate(p, c, cfg);
    CHECK(a.pu_delivered != d.pu_delivered);
}

TEST_CASE("packet conservation is exact") {
    const SystemParams p = five_su_reference(0.45);
    const ConditionalPolicy c = reference_policy(p);
    SimConfig cfg;
    cfg.horizon = 100000;
    cfg.seed = 9;
    const SimReport rep = simulate(p, c, cfg);
    CHECK(rep.pu_arrived == rep.pu_delivered + rep.final_backlog);
    std::int64_t tallies = 0;
    for (auto t : rep.event_tally) tallies += t;
    CHECK(tallies == rep.counted_slots);
}

TEST_CASE("long runs track the analytic rates and occupancy") {
    SystemParams p = five_su_reference(0.3);
    const ConditionalPolicy c = reference_policy(p);
    const auto rates = su_rates(c, p);
    const double service = pu_service_rate(c, p);
    SimConfig cfg;
    cfg.horizon = 1000000;
    cfg.seed = 1234;
    const SimReport rep = simulate(p, c, cfg);

    CHECK(std::fabs(sum(rep.su_throughput) - sum(rates)) <= 0.01 * sum(rates));
    CHECK(std::fabs(rep.busy_fraction - 0.3 / service) <= 0.01 * (0.3 / service));
    CHECK(rep.backlog_over_horizon <= 1e-3);
    for (std::size_t s = 0; s < 5; ++s) {
        const double sigma = 3.0 * std::sqrt(std::max(rates[s], 1e-9) / 1e6);
        CHECK(rep.su_throughput[s] <= rates[s] + sigma + 1e-9);
        CHECK(rep.su_throughput[s] >= rates[s] - sigma - 1e-9);
    }
    // power audit: within 3 sigma of the analytic average
    const auto power = avg_power(c, p);
    for (std::size_t s = 0; s < 5; ++s) {
        const double sigma = 3.0 * std::sqrt(0.25 / 1e6);
        CHECK(rep.su_power_charged[s] <= power[s] + sigma);
        CHECK(rep.su_power_charged[s] >= power[s] - sigma);
        CHECK(rep.su_power_spent[s] == rep.su_power_charged[s]);  // backlogged SUs always transmit
    }
}

TEST_CASE("stability flips across the limit") {
    SystemParams p = five_su_reference();
    const double lam = max_stable_rate(p);

    // just below: policy solved at 0.95 lambda_hat keeps Q/T tiny
    p.pu_arrival_rate = 0.95 * lam;
    const ConditionalPolicy stable_pol = reference_policy(p);
    SimConfig cfg;
    cfg.horizon = 300000;
    cfg.seed = 77;
    const SimReport ok = simulate(p, stable_pol, cfg);
    CHECK(ok.backlog_over_horizon <= 1e-3);

    // just above: even full-time best assistance cannot carry the load
    SystemParams over = p;
    over.pu_arrival_rate = 1.05 * lam;
    ConditionalPolicy all_coop;
    all_coop.cond_busy = zero_table_like(p);
    all_coop.cond_idle = zero_table_like(p);
    for (std::size_t s = 0; s < 5; ++s) all_coop.cond_busy[s][4] = 0.15;
    all_coop.cond_busy[0][0] = 0.25;
    all_coop.busy_prob = 1.0;
    all_coop.idle_prob = 0.0;
    const SimReport bad = simulate(over, all_coop, cfg);
    CHECK(bad.backlog_over_horizon >= 0.01);
}

TEST_CASE("the no-cooperation baseline is unstable at 0.45") {
    SystemParams p = five_su_reference(0.45);
    ConditionalPolicy c;
    c.cond_busy = zero_table_like(p);
    c.cond_idle = zero_table_like(p);
    c.cond_busy[0][0] = 1.0;
    c.cond_idle[0][4] = 1.0;
    c.busy_prob = 1.0;
    c.idle_prob = 0.0;
    SimConfig cfg;
    cfg.horizon = 1000000;
    cfg.seed = 3;
    const SimReport rep = simulate(p, c, cfg);
    CHECK(rep.backlog_over_horizon >= 0.02);
}

TEST_CASE("scan rows expose the blow-up past the limit") {
    SystemParams p = five_su_reference();
    SimConfig cfg;
    cfg.horizon = 200000;
    cfg.seed = 11;
    auto factory = [&p](double lam) {
        SystemParams at = p;
        at.pu_arrival_rate = lam;
        const SolveReport rep = solve_policy(at, Objective::sum_rate(5));
        if (rep.status != SolveStatus::optimal) throw std::runtime_error("infeasible");
        return to_conditional(rep.policy);
    };
    const auto rows = stability_scan(p, factory, {0.2, 0.45, 0.7, 0.75}, cfg);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].solved);
    CHECK(rows[1].solved);
    CHECK(rows[2].solved);
    CHECK_FALSE(rows[3].solved);  // beyond the stability limit
    CHECK(rows[0].backlog_over_horizon <= 1e-3);
    CHECK(rows[1].backlog_over_horizon <= 1e-3);
    // Little cross-check at the stable points
    for (int k : {0, 1}) CHECK(std::fabs(rows[k].busy_fraction - rows[k].analytic_busy_prob) <= 0.01);
}

TEST_CASE("empty-queue draws burn the slot but not the power") {
    SystemParams p = two_su_reference(0.0);
    ConditionalPolicy c = no_cooperation_policy(p);
    SimConfig cfg;
    cfg.horizon = 100000;
    cfg.seed = 21;
    cfg.su_arrivals = std::vector<ArrivalSpec>{{ArrivalSpec::Law::bernoulli, 0.05},
                                               {ArrivalSpec::Law::bernoulli, 0.0}};
    const SimReport rep = simulate(p, c, cfg);
    // SU 0 is drawn every idle slot at level 4 but only has packets at rate 0.05
    CHECK(rep.su_power_charged[0] == doctest::Approx(1.0).epsilon(0.01));
    CHECK(rep.su_power_spent[0] <= 0.06);
    CHECK(rep.su_throughput[0] == doctest::Approx(0.05).epsilon(0.05));
    CHECK(rep.su_dropped[0] == 0);
}

TEST_CASE("flow control thins arrivals") {
    SystemParams p = two_su_reference(0.0);
    ConditionalPolicy c = no_cooperation_policy(p);
    SimConfig cfg;
    cfg.horizon = 200000;
    cfg.seed = 22;
    cfg.su_arrivals = std::vector<ArrivalSpec>{{ArrivalSpec::Law::bernoulli, 0.8},
                                               {ArrivalSpec::Law::bernoulli, 0.0}};
    cfg.admission = std::vector<double>{0.25, 1.0};
    const SimReport rep = simulate(p, c, cfg);
    const double admitted =
        static_cast<double>(rep.su_arrived[0] - rep.su_dropped[0]) / static_cast<double>(rep.slots);
    CHECK(admitted == doctest::Approx(0.2).epsilon(0.05));
    CHECK(rep.su_throughput[0] == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("imperfect sensing tallies match the analytic event accounting") {
    const SystemParams p = two_su_reference(0.3);
    const SensingModel m{0.9, 0.1};
    SensingSearch grid;
    grid.grid_points = 101;
    const SensingSolveReport s = solve_sensing(p, m, Objective::sum_rate(2), grid);
    REQUIRE(s.status == SolveStatus::optimal);

    SimConfig cfg;
    cfg.horizon = 1000000;
    cfg.seed = 31;
    cfg.sensing = m;
    const SimReport rep = simulate(p, s.policy, cfg);

    // The simulated occupancy is endogenous; evaluate the analytic
    // expressions at the observed busy fraction before comparing.
    const double qb = rep.busy_fraction, qe = 1.0 - qb;
    double busy_term = 0.0, idle0 = 0.0;
    for (std::size_t su = 0; su < p.num_sus(); ++su) {
        idle0 += s.policy.cond_idle[su][0];
        for (std::size_t i = 0; i < p.num_levels(su); ++i)
            busy_term += p.coop_success[su][i] * s.policy.cond_busy[su][i];
    }
    const double pu_rate_pred = qb * m.p_detect * busy_term +
                                qb * (1.0 - m.p_detect) * p.solo_success * idle0;
    CHECK(std::fabs(rep.pu_throughput - pu_rate_pred) <= 0.015 * pu_rate_pred);

    for (std::size_t su = 0; su < p.num_sus(); ++su) {
        double pb = 0.0, pe = 0.0;
        for (std::size_t i = 0; i < p.num_levels(su); ++i) {
            pb += p.power_levels[su][i] * s.policy.cond_busy[su][i];
            pe += p.power_levels[su][i] * s.policy.cond_idle[su][i];
        }
        const double bw = qb * m.p_detect + qe * m.p_false_alarm;
        const double power_pred = bw * pb + (1.0 - bw) * pe;
        if (power_pred > 1e-6)
            CHECK(std::fabs(rep.su_power_charged[su] - power_pred) <= 0.01 * power_pred + 3e-4);
    }
    // four-event split matches its probabilities loosely (3-sigma scale)
    const double n = static_cast<double>(rep.counted_slots);
    CHECK(std::fabs(static_cast<double>(rep.event_tally[0]) / n - qb * m.p_detect) <= 3e-3);
    CHECK(std::fabs(static_cast<double>(rep.event_tally[3]) / n - qe * m.p_false_alarm) <= 3e-3);
    CHECK(rep.collisions > 0);
}

TEST_CASE("configuration errors are rejected") {
    const SystemParams p = two_su_reference(0.3);
    const ConditionalPolicy c = no_cooperation_policy(p);
    SimConfig cfg;
    cfg.horizon = 0;
    CHECK_THROWS_AS(simulate(p, c, cfg), std::invalid_argument);
    cfg.horizon = 10;
    cfg.pu_arrival = {ArrivalSpec::Law::bernoulli, 1.5};
    CHECK_THROWS_AS(simulate(p, c, cfg), std::invalid_argument);
    cfg.pu_arrival = {ArrivalSpec::Law::poisson, 1.5};  // poisson may exceed 1
    CHECK_NOTHROW(simulate(p, c, cfg));
    cfg.warmup_fraction = 1.0;
    CHECK_THROWS_AS(simulate(p, c, cfg), std::invalid_argument);
}
