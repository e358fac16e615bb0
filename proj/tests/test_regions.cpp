#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "coopcr/layout.hpp"
#include "coopcr/optimizer.hpp"
#include "coopcr/regions.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace coopcr;
using namespace coopcr::testing;

namespace {

// The stability LP in canonical form, for oracle cross-checks.
LpProblem stability_lp_of(const SystemParams& p) {
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

// Random relaxed-class policy made feasible for the given instance by
// shifting transmit mass to level 0 until the power rows hold.
RelaxedPolicy random_feasible_c2(const SystemParams& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RelaxedPolicy pol{zero_table_like(p), zero_table_like(p)};
    double total = 0.0;
    for (std::size_t s = 0; s < p.num_sus(); ++s)
        for (std::size_t i = 0; i < p.num_levels(s); ++i) {
            pol.assist[s][i] = u(rng);
            pol.own[s][i] = u(rng);
            total += pol.assist[s][i] + pol.own[s][i];
        }
    for (auto* t : {&pol.assist, &pol.own})
        for (auto& row : *t)
            for (double& v : row) v /= total;
    for (std::size_t s = 0; s < p.num_sus(); ++s) {
        auto power = [&] {
            double w = 0.0;
            for (std::size_t i = 0; i < p.num_levels(s); ++i)
                w += p.power_levels[s][i] * (pol.assist[s][i] + pol.own[s][i]);
            return w;
        };
        while (power() > p.power_budget[s]) {
            // halve the highest-level masses, moving the difference to level 0
            for (auto* t : {&pol.assist, &pol.own}) {
                auto& row = (*t)[s];
                for (std::size_t i = row.size(); i-- > 1;) {
                    const double take = 0.5 * row[i];
                    row[i] -= take;
                    row[0] += take;
                }
            }
        }
    }
    return pol;
}

double served_rate(const RelaxedPolicy& pol, const SystemParams& p) {
    double v = 0.0;
    for (std::size_t s = 0; s < p.num_sus(); ++s)
        for (std::size_t i = 0; i < p.num_levels(s); ++i) v += p.coop_success[s][i] * pol.assist[s][i];
    return v;
}

}  // namespace

TEST_CASE("zero budgets pin the stability limit at the solo rate") {
    SystemParams p = two_su_reference();
    p.power_budget.assign(2, 0.0);
    CHECK(max_stable_rate(p) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("single SU stability limit matches the enumeration oracle") {
    const SystemParams p = single_su_reference(0.5);
    const double lam = max_stable_rate(p);
    const auto oracle = enumerate_basic_solutions(stability_lp_of(p));
    REQUIRE(oracle.feasible);
    CHECK(lam == doctest::Approx(oracle.objective).epsilon(1e-9));
    CHECK(lam == doctest::Approx(0.6).epsilon(1e-9));
}

TEST_CASE("stability limit never drops below the solo rate") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 25; ++trial) {
        const SystemParams p = random_instance(rng);
        CHECK(max_stable_rate(p) >= p.solo_success - 1e-12);
    }
}

TEST_CASE("stability limit is monotone in budgets and assistance quality") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 10; ++trial) {
        SystemParams p = random_instance(rng);
        const double base = max_stable_rate(p);
        SystemParams more_budget = p;
        for (double& b : more_budget.power_budget) b += 0.2;
        CHECK(max_stable_rate(more_budget) >= base - 1e-10);
        SystemParams better_coop = p;
        for (auto& row : better_coop.coop_success)
            for (std::size_t i = 1; i < row.size(); ++i)
                row[i] = std::min(1.0, row[i] + 0.05 * static_cast<double>(i));
        CHECK(max_stable_rate(better_coop) >= base - 1e-10);
    }
}

TEST_CASE("scaled stability certificate is feasible at any lower rate") {
    const SystemParams p = five_su_reference();
    const StabilityCertificate cert = max_stable_rate_certificate(p);
    CHECK(cert.lambda_hat == doctest::Approx(0.7).epsilon(1e-9));
    for (const double lambda_p : {0.1, 0.35, 0.6, cert.lambda_hat}) {
        const double scale = lambda_p / cert.lambda_hat;
        JointPolicy j{zero_table_like(p), zero_table_like(p)};
        double mass = 0.0;
        for (std::size_t s = 0; s < p.num_sus(); ++s)
            for (std::size_t i = 0; i < p.num_levels(s); ++i) {
                j.q_b[s][i] = scale * cert.coop_mass[s][i];
                mass += j.q_b[s][i];
            }
        j.q_e[0][0] = 1.0 - mass;  // park the leftover mass on a free action
        REQUIRE(check_policy(j).empty());
        double served = 0.0;
        for (std::size_t s = 0; s < p.num_sus(); ++s)
            for (std::size_t i = 0; i < p.num_levels(s); ++i)
                served += p.coop_success[s][i] * j.q_b[s][i];
        CHECK(served == doctest::Approx(lambda_p).epsilon(1e-9));
        const auto power = avg_power(j, p);
        for (std::size_t s = 0; s < p.num_sus(); ++s) CHECK(power[s] <= p.power_budget[s] + 1e-9);
    }
}

TEST_CASE("relaxed-class solve matches the priority-respecting value") {
    const SystemParams p = two_su_reference(0.3);
    const std::vector<double> w{1.0, 1.0};
    const RelaxedSolve c2 = relaxed_max_weighted_rate(p, 0.3, w);
    REQUIRE(c2.status == LpStatus::optimal);
    const SolveReport rep = solve_policy(p, Objective::weighted(w));
    REQUIRE(rep.status == SolveStatus::optimal);
    CHECK(std::fabs(c2.value - rep.objective) <= 1e-7);
    CHECK(c2.value == doctest::Approx(0.625).epsilon(1e-9));
}

TEST_CASE("relaxed-class solve with a slack PU constraint") {
    const SystemParams p = two_su_reference(0.0);
    const RelaxedSolve c2 = relaxed_max_weighted_rate(p, 0.0, {1.0, 1.0});
    REQUIRE(c2.status == LpStatus::optimal);
    const SolveReport rep = solve_policy(p, Objective::sum_rate(2));
    REQUIRE(rep.status == SolveStatus::optimal);
    CHECK(std::fabs(c2.value - rep.objective) <= 1e-7);
}

TEST_CASE("arrival rates beyond the stability limit are infeasible") {
    const SystemParams p = two_su_reference();
    const double lam = max_stable_rate(p);
    CHECK(relaxed_max_weighted_rate(p, lam + 1e-3, {1.0, 1.0}).status == LpStatus::infeasible);
}

TEST_CASE("region equivalence holds on random instances") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        SystemParams p = random_instance(rng);
        const double lam = max_stable_rate(p);
        p.pu_arrival_rate = u(rng) * lam;
        std::vector<double> w(p.num_sus());
        for (auto& v : w) v = 0.05 + u(rng);
        const RelaxedSolve c2 = relaxed_max_weighted_rate(p, p.pu_arrival_rate, w);
        const SolveReport rep = solve_policy(p, Objective::weighted(w));
        REQUIRE(c2.status == LpStatus::optimal);
        REQUIRE(rep.status == SolveStatus::optimal);
        CHECK(std::fabs(c2.value - rep.objective) <= 1e-7);
    }
}

TEST_CASE("conversion passes a tight policy through unchanged") {
    const SystemParams p = single_su_reference();
    RelaxedPolicy pol{zero_table_like(p), zero_table_like(p)};
    pol.assist[0][4] = 0.5;  // serves 0.4
    pol.own[0][2] = 0.5;
    const JointPolicy j = convert_relaxed_policy(pol, p, 0.4);
    CHECK(j.q_b[0][4] == 0.5);
    CHECK(j.q_e[0][2] == 0.5);
}

TEST_CASE("conversion mixes assistance toward level 0 when the PU is over-served") {
    const SystemParams p = single_su_reference();
    RelaxedPolicy pol{zero_table_like(p), zero_table_like(p)};
    pol.assist[0][4] = 1.0;  // serves 0.8 with transmit probability 1
    const JointPolicy j = convert_relaxed_policy(pol, p, 0.6);
    CHECK(j.q_b[0][4] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(j.q_b[0][0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(table_sum(j.q_e) == 0.0);
}

TEST_CASE("conversion shrinks the transmit probability when level 0 over-serves") {
    const SystemParams p = single_su_reference();
    RelaxedPolicy pol{zero_table_like(p), zero_table_like(p)};
    pol.assist[0][0] = 0.5;  // zero-power assistance, serves 0.2
    pol.own[0][0] = 0.5;
    const JointPolicy j = convert_relaxed_policy(pol, p, 0.1);
    CHECK(j.q_b[0][0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(j.q_e[0][0] == doctest::Approx(0.75).epsilon(1e-12));
    double served = 0.0;
    for (std::size_t i = 0; i <= 4; ++i) served += p.coop_success[0][i] * j.q_b[0][i];
    CHECK(served == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("conversion preserves rates and never raises power") {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int converted = 0;
    while (converted < 100) {
        SystemParams p = random_instance(rng);
        const RelaxedPolicy pol = random_feasible_c2(p, rng);
        const double served = served_rate(pol, p);
        if (served <= 1e-6) continue;
        const double assist_total = table_sum(pol.assist);
        if (assist_total >= 1.0 - 1e-9) continue;  // the shrink branch needs idle mass
        const double lambda_p = u(rng) * served;
        p.pu_arrival_rate = lambda_p;
        const JointPolicy j = convert_relaxed_policy(pol, p, lambda_p);
        ++converted;

        // constraint residuals of the converted policy
        double srv = 0.0;
        for (std::size_t s = 0; s < p.num_sus(); ++s)
            for (std::size_t i = 0; i < p.num_levels(s); ++i) srv += p.coop_success[s][i] * j.q_b[s][i];
        CHECK(std::fabs(srv - lambda_p) <= 1e-9);
        CHECK(std::fabs(table_sum(j.q_e) + table_sum(j.q_b) - 1.0) <= 1e-9);
        for (std::size_t s = 0; s < p.num_sus(); ++s)
            for (std::size_t i = 0; i < p.num_levels(s); ++i) {
                CHECK(j.q_e[s][i] >= -1e-15);
                CHECK(j.q_b[s][i] >= -1e-15);
            }

        // rates preserved exactly, power never up
        const auto r_joint = su_rates(j, p);
        const auto w_joint = avg_power(j, p);
        for (std::size_t s = 0; s < p.num_sus(); ++s) {
            double r_c2 = 0.0, w_c2 = 0.0;
            for (std::size_t i = 0; i < p.num_levels(s); ++i) {
                r_c2 += p.su_success[s][i] * pol.own[s][i];
                w_c2 += p.power_levels[s][i] * (pol.own[s][i] + pol.assist[s][i]);
            }
            CHECK(std::fabs(r_joint[s] - r_c2) <= 1e-12);
            CHECK(w_joint[s] <= w_c2 + 1e-12);
        }
    }
}

TEST_CASE("conversion rejects an under-serving policy") {
    const SystemParams p = single_su_reference();
    RelaxedPolicy pol{zero_table_like(p), zero_table_like(p)};
    pol.assist[0][0] = 1.0;  // serves at most 0.4
    CHECK_THROWS_AS(convert_relaxed_policy(pol, p, 0.5), std::invalid_argument);
}

TEST_CASE("boundary sweep follows the weight direction") {
    const SystemParams p = two_su_reference(0.3);

    // axis direction: the value is the best single-SU rate
    const auto axis = rate_region_boundary(p, 0.3, {{1.0, 0.0}});
    REQUIRE(axis.size() == 1);
    const SolveReport best1 = solve_policy(p, Objective::weighted({1.0, 0.0}));
    CHECK(axis[0].value == doctest::Approx(best1.objective).epsilon(1e-12));
    CHECK(axis[0].value == doctest::Approx(axis[0].rates[0]).epsilon(1e-9));

    // symmetric instance: swapping the weights cannot change the value
    const auto a = rate_region_boundary(p, 0.3, {{0.7, 0.3}});
    const auto b = rate_region_boundary(p, 0.3, {{0.3, 0.7}});
    CHECK(a[0].value == doctest::Approx(b[0].value).epsilon(1e-9));

    // sweep of the quarter circle: the favored SU's rate is nondecreasing
    std::vector<std::vector<double>> dirs;
    for (int k = 0; k <= 32; ++k) {
        const double t = static_cast<double>(k) / 32.0 * 1.5707963267948966;
        dirs.push_back({std::sin(t) + 1e-9, std::cos(t) + 1e-9});
    }
    const auto sweep = rate_region_boundary(p, 0.3, dirs);
    for (std::size_t k = 1; k < sweep.size(); ++k)
        CHECK(sweep[k].rates[0] >= sweep[k - 1].rates[0] - 1e-7);
}

TEST_CASE("boundary sweep rejects an unstable arrival rate") {
    const SystemParams p = two_su_reference();
    CHECK(max_stable_rate(p) == doctest::Approx(0.8).epsilon(1e-9));  // 0.4 + 0.4 * total budget
    CHECK_THROWS_AS(rate_region_boundary(p, 0.85, {{1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(rate_region_boundary(p, 0.3, {{0.0, 0.0}}), std::invalid_argument);
}
