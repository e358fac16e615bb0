#include "coopcr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace coopcr {

namespace {

// splitmix64: decorrelates replication seeds derived from one base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double u01() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return u01() < p; }
    // Inversion sampler; arrival rates here are O(1) packets/slot.
    std::int64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        const double l = std::exp(-lambda);
        std::int64_t k = 0;
        double prod = u01();
        while (prod > l) {
            ++k;
            prod *= u01();
        }
        return k;
    }
    std::int64_t arrivals(const ArrivalSpec& a) {
        if (a.law == ArrivalSpec::Law::bernoulli) return bernoulli(a.rate) ? 1 : 0;
        return poisson(a.rate);
    }
};

// Flattened categorical sampler over (su, level) pairs. A zero-mass table
// becomes "no action", the degenerate-state convention.
struct ActionSampler {
    std::vector<double> cdf;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> action;
    bool active = false;

    ActionSampler() = default;
    ActionSampler(const LevelTable& table, double total) {
        if (total <= 0.0) return;
        active = true;
        double acc = 0.0;
        for (std::size_t s = 0; s < table.size(); ++s)
            for (std::size_t i = 0; i < table[s].size(); ++i) {
                if (table[s][i] <= 0.0) continue;
                acc += table[s][i] / total;
                cdf.push_back(acc);
                action.emplace_back(static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(i));
            }
        if (!cdf.empty()) cdf.back() = 1.0;
    }

    std::pair<std::uint32_t, std::uint32_t> draw(Rng& rng) const {
        const double u = rng.u01();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t k = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
        return action[k];
    }
};

}  // namespace

SimReport simulate(const SystemParams& params, const ConditionalPolicy& policy,
                   const SimConfig& config) {
    require_valid(params);
    {
        const auto issues = check_policy(policy);
        if (!issues.empty()) throw std::invalid_argument("simulate: invalid policy: " + issues.front());
        if (policy.cond_busy.size() != params.num_sus())
            throw std::invalid_argument("simulate: policy/user count mismatch");
    }
    if (config.horizon < 1) throw std::invalid_argument("simulate: horizon must be >= 1");
    if (config.warmup_fraction < 0.0 || config.warmup_fraction >= 1.0)
        throw std::invalid_argument("simulate: warmup fraction outside [0,1)");

    ArrivalSpec pu = config.pu_arrival;
    if (pu.rate < 0.0) pu.rate = params.pu_arrival_rate;
    if (pu.law == ArrivalSpec::Law::bernoulli && pu.rate > 1.0)
        throw std::invalid_argument("simulate: bernoulli arrival rate > 1");

    const std::size_t nsu = params.num_sus();
    std::vector<ArrivalSpec> su_arr;
    const bool backlogged = !config.su_arrivals.has_value();
    if (!backlogged) {
        su_arr = *config.su_arrivals;
        if (su_arr.size() != nsu) throw std::invalid_argument("simulate: su arrival count mismatch");
        for (const auto& a : su_arr) {
            if (a.rate < 0.0) throw std::invalid_argument("simulate: negative su arrival rate");
            if (a.law == ArrivalSpec::Law::bernoulli && a.rate > 1.0)
                throw std::invalid_argument("simulate: bernoulli arrival rate > 1");
        }
    }
    std::vector<double> admission(nsu, 1.0);
    if (config.admission) {
        admission = *config.admission;
        if (admission.size() != nsu) throw std::invalid_argument("simulate: admission vector mismatch");
        for (double a : admission)
            if (a < 0.0 || a > 1.0) throw std::invalid_argument("simulate: admission prob outside [0,1]");
    }
    const bool perfect = !config.sensing.has_value();
    const double pd = perfect ? 1.0 : config.sensing->p_detect;
    const double pf = perfect ? 0.0 : config.sensing->p_false_alarm;
    if (!perfect) {
        if (pd < 0.0 || pd > 1.0 || pf < 0.0 || pf > 1.0)
            throw std::invalid_argument("simulate: sensing probabilities outside [0,1]");
    }

    const ActionSampler busy_draw(policy.cond_busy, table_sum(policy.cond_busy));
    const ActionSampler idle_draw(policy.cond_idle, table_sum(policy.cond_idle));

    Rng rng(mix_seed(config.seed, 0));
    const std::int64_t T = config.horizon;
    const std::int64_t warmup = static_cast<std::int64_t>(config.warmup_fraction * static_cast<double>(T));

    SimReport rep;
    rep.slots = T;
    rep.su_throughput.assign(nsu, 0.0);
    rep.su_power_charged.assign(nsu, 0.0);
    rep.su_power_spent.assign(nsu, 0.0);
    rep.su_arrived.assign(nsu, 0);
    rep.su_dropped.assign(nsu, 0);

    std::int64_t qp = 0;
    std::vector<std::int64_t> su_queue(nsu, 0);
    std::vector<std::int64_t> su_delivered(nsu, 0);
    std::int64_t busy_slots = 0, pu_success_counted = 0;
    double backlog_sum = 0.0;

    for (std::int64_t t = 0; t < T; ++t) {
        const bool counted = t >= warmup;

        // 1. Arrivals (PU, then flow-controlled SU arrivals).
        {
            const std::int64_t a = rng.arrivals(pu);
            qp += a;
            rep.pu_arrived += a;
        }
        if (!backlogged) {
            for (std::size_t s = 0; s < nsu; ++s) {
                const std::int64_t a = rng.arrivals(su_arr[s]);
                rep.su_arrived[s] += a;
                for (std::int64_t j = 0; j < a; ++j) {
                    if (admission[s] >= 1.0 || rng.bernoulli(admission[s]))
                        ++su_queue[s];
                    else
                        ++rep.su_dropped[s];
                }
            }
        }

        // 2. Sensing.
        const bool truly_busy = qp > 0;
        const bool sensed_busy = perfect ? truly_busy : rng.bernoulli(truly_busy ? pd : pf);
        if (counted) {
            if (truly_busy)
                ++rep.event_tally[sensed_busy ? 0 : 1];
            else
                ++rep.event_tally[sensed_busy ? 3 : 2];
            ++rep.counted_slots;
            backlog_sum += static_cast<double>(qp);
            if (truly_busy) ++busy_slots;
        }

        // 3. One action draw from the table matching the sensed state.
        if (sensed_busy) {
            double power = 0.0;
            double coop = params.solo_success;  // PU alone if the table is inactive
            if (busy_draw.active) {
                const auto [s, i] = busy_draw.draw(rng);
                power = params.power_levels[s][i];
                coop = params.coop_success[s][i];
                if (counted) {
                    rep.su_power_charged[s] += power;
                    rep.su_power_spent[s] += power;  // assistance radiates even on a false alarm
                }
            }
            if (truly_busy && rng.bernoulli(coop)) {
                --qp;
                ++rep.pu_delivered;
                if (counted) ++pu_success_counted;
            }
        } else {
            std::uint32_t s = 0, i = 0;
            if (idle_draw.active) {
                const auto a = idle_draw.draw(rng);
                s = a.first;
                i = a.second;
            }
            const double power = idle_draw.active ? params.power_levels[s][i] : 0.0;
            const bool wants_tx = idle_draw.active && i > 0;
            const bool has_data = backlogged || su_queue[s] > 0;
            if (counted && idle_draw.active) rep.su_power_charged[s] += power;

            if (truly_busy) {
                // Missed detection: a real SU transmission collides with the
                // PU; otherwise the PU transmits alone.
                if (wants_tx && has_data) {
                    if (counted) {
                        rep.su_power_spent[s] += power;
                        ++rep.collisions;
                    }
                } else if (rng.bernoulli(params.solo_success)) {
                    --qp;
                    ++rep.pu_delivered;
                    if (counted) ++pu_success_counted;
                }
            } else if (wants_tx) {
                if (has_data) {
                    if (counted) rep.su_power_spent[s] += power;
                    if (rng.bernoulli(params.su_success[s][i])) {
                        if (!backlogged) --su_queue[s];
                        if (counted) ++su_delivered[s];
                    }
                }
                // Drawn with an empty queue: the slot is lost, nothing radiates.
            }
        }
    }

    rep.final_backlog = qp;
    rep.backlog_over_horizon = static_cast<double>(qp) / static_cast<double>(T);
    const double denom = static_cast<double>(std::max<std::int64_t>(rep.counted_slots, 1));
    rep.mean_backlog = backlog_sum / denom;
    rep.busy_fraction = static_cast<double>(busy_slots) / denom;
    rep.pu_throughput = static_cast<double>(pu_success_counted) / denom;
    rep.pu_service_rate =
        busy_slots > 0 ? static_cast<double>(pu_success_counted) / static_cast<double>(busy_slots) : 0.0;
    for (std::size_t s = 0; s < nsu; ++s) {
        rep.su_throughput[s] = static_cast<double>(su_delivered[s]) / denom;
        rep.su_power_charged[s] /= denom;
        rep.su_power_spent[s] /= denom;
    }
    return rep;
}

std::vector<ScanRow> stability_scan(
    const SystemParams& params, const std::function<ConditionalPolicy(double)>& policy_factory,
    const std::vector<double>& lambda_grid, const SimConfig& base_config) {
    std::vector<ScanRow> rows;
    rows.reserve(lambda_grid.size());
    for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
        const double lp = lambda_grid[k];
        ScanRow row;
        row.lambda_p = lp;
        SystemParams at_rate = params;
        at_rate.pu_arrival_rate = lp;
        try {
            const ConditionalPolicy pol = policy_factory(lp);
            SimConfig cfg = base_config;
            cfg.pu_arrival.rate = lp;
            cfg.seed = mix_seed(base_config.seed, k + 1);
            const SimReport rep = simulate(at_rate, pol, cfg);
            row.solved = true;
            const auto rates = su_rates(pol, at_rate);
            for (double r : rates) row.analytic_objective += r;
            const double srv = pu_service_rate(pol, at_rate);
            row.analytic_busy_prob = srv > 0.0 ? std::min(lp / srv, 1.0) : (lp > 0.0 ? 1.0 : 0.0);
            for (double thr : rep.su_throughput) row.sum_throughput += thr;
            row.busy_fraction = rep.busy_fraction;
            row.mean_backlog = rep.mean_backlog;
            row.backlog_over_horizon = rep.backlog_over_horizon;
            for (double p : rep.su_power_spent) row.max_su_power = std::max(row.max_su_power, p);
        } catch (const std::exception&) {
            row.solved = false;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace coopcr
