// coopcr: experiment driver for busy/idle cooperation policies on a slotted
// primary/secondary channel. Every subcommand reads one system configuration
// file, writes machine-readable artifacts into the output directory and a
// manifest.json that records everything needed to reproduce them.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coopcr/admm.hpp"
#include "coopcr/config_io.hpp"
#include "coopcr/optimizer.hpp"
#include "coopcr/regions.hpp"
#include "coopcr/sensing.hpp"
#include "coopcr/sim.hpp"

using json = nlohmann::ordered_json;
using namespace coopcr;

namespace {

constexpr const char* kVersion = "coopcr 0.1.0";

enum ExitCode : int {
    kOk = 0,
    kBadConfig = 2,
    kInfeasible = 3,
    kNonConvergence = 4,
    kNumericFailure = 5,
};

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Run {
    std::string command;
    std::vector<std::string> argv;
    std::string out_dir;
    std::string config_path;
    std::string config_text;
    json options = json::object();
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    SystemParams load_params() {
        config_text = read_file(config_path);
        SystemParams p = parse_system_params(config_text);
        require_valid(p);
        return p;
    }

    std::string path(const std::string& name) {
        std::filesystem::create_directories(out_dir);
        return (std::filesystem::path(out_dir) / name).string();
    }

    void emit(const std::string& name, const std::string& content) {
        write_file(path(name), content);
        outputs.push_back(name);
        std::cout << "wrote " << path(name) << "\n";
    }

    void finish() {
        json m;
        m["tool"] = "coopcr";
        m["version"] = kVersion;
        m["command"] = command;
        m["arguments"] = argv;
        m["config_path"] = config_path;
        m["config_text"] = config_text;
        m["options"] = options;
        m["outputs"] = outputs;
        m["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
        write_file(path("manifest.json"), m.dump(2) + "\n");
        std::cout << "wrote " << path("manifest.json") << "\n";
    }
};

std::vector<double> parse_csv_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": bad number '" + tok + "'");
        }
    }
    if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
    return out;
}

// "a:b:step" inclusive grid, or a plain comma list.
std::vector<double> parse_grid(const std::string& text) {
    if (text.find(':') == std::string::npos) return parse_csv_list(text, "grid");
    std::stringstream ss(text);
    std::string a, b, st;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, st))
        throw ConfigError("grid: expected start:stop:step");
    const double lo = std::stod(a), hi = std::stod(b), step = std::stod(st);
    if (step <= 0.0) throw ConfigError("grid: step must be positive");
    std::vector<double> out;
    for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
    return out;
}

Objective make_objective(const std::string& kind, const std::string& weights_csv, std::size_t n,
                         double log_delta) {
    if (kind == "sum") return Objective::sum_rate(n);
    if (kind == "log") return Objective::log_utility_of(n, log_delta);
    if (kind == "weighted") {
        if (weights_csv.empty()) throw ConfigError("--weights is required with --objective weighted");
        auto w = parse_csv_list(weights_csv, "--weights");
        if (w.size() != n) throw ConfigError("--weights: need one weight per SU");
        return Objective::weighted(std::move(w));
    }
    throw ConfigError("unknown objective '" + kind + "' (sum|log|weighted)");
}

std::string vec_line(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += " ";
        s += format_double(v[i]);
    }
    return s;
}

std::string solve_report_text(const SolveReport& rep) {
    std::ostringstream os;
    os << "status = " << to_string(rep.status) << "\n";
    os << "objective = " << format_double(rep.objective) << "\n";
    os << "iterations = " << rep.iterations << "\n";
    os << "su_rate = " << vec_line(rep.su_rate) << "\n";
    os << "su_power = " << vec_line(rep.su_power) << "\n";
    if (!rep.throughput.empty()) {
        os << "throughput = " << vec_line(rep.throughput) << "\n";
        os << "admission = " << vec_line(rep.admission) << "\n";
    }
    return os.str();
}

void require_solved(SolveStatus status) {
    if (status == SolveStatus::infeasible)
        throw InfeasibleError("the arrival rate is outside the stability region");
    if (status == SolveStatus::not_converged) throw ConvergenceError("solver did not converge");
    if (status == SolveStatus::unbounded) throw std::runtime_error("solver reported unbounded");
}

ConditionalPolicy no_cooperation_policy(const SystemParams& p) {
    ConditionalPolicy c;
    c.cond_busy = zero_table_like(p);
    c.cond_idle = zero_table_like(p);
    c.cond_busy[0][0] = 1.0;
    c.cond_idle[0][0] = 1.0;
    c.busy_prob = 1.0;
    c.idle_prob = 0.0;
    return c;
}

std::string sim_report_text(const SimReport& rep) {
    std::ostringstream os;
    os << "slots = " << rep.slots << "\n";
    os << "counted_slots = " << rep.counted_slots << "\n";
    os << "su_throughput = " << vec_line(rep.su_throughput) << "\n";
    os << "pu_throughput = " << format_double(rep.pu_throughput) << "\n";
    os << "pu_service_rate = " << format_double(rep.pu_service_rate) << "\n";
    os << "busy_fraction = " << format_double(rep.busy_fraction) << "\n";
    os << "mean_backlog = " << format_double(rep.mean_backlog) << "\n";
    os << "final_backlog = " << rep.final_backlog << "\n";
    os << "backlog_over_horizon = " << format_double(rep.backlog_over_horizon) << "\n";
    os << "su_power_charged = " << vec_line(rep.su_power_charged) << "\n";
    os << "su_power_spent = " << vec_line(rep.su_power_spent) << "\n";
    os << "collisions = " << rep.collisions << "\n";
    os << "event_tally = " << rep.event_tally[0] << " " << rep.event_tally[1] << " "
       << rep.event_tally[2] << " " << rep.event_tally[3] << "\n";
    std::ostringstream drops;
    for (std::size_t s = 0; s < rep.su_dropped.size(); ++s) {
        if (s) drops << " ";
        drops << rep.su_dropped[s];
    }
    os << "su_dropped = " << drops.str() << "\n";
    os << "pu_arrived = " << rep.pu_arrived << "\n";
    os << "pu_delivered = " << rep.pu_delivered << "\n";
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kVersion) +
                 " - cooperation policies for a slotted primary/secondary radio channel"};
    app.require_subcommand(1);

    Run run;
    for (int i = 0; i < argc; ++i) run.argv.emplace_back(argv[i]);
    const char* env_out = std::getenv("COOPCR_OUT");
    run.out_dir = env_out ? env_out : ".";
    app.add_option("-o,--out", run.out_dir, "output directory for artifacts");

    try {
        // shared option storage
        std::string objective_kind = "sum", weights_csv;
        double log_delta = 1e-6;
        double lambda_p = -1.0;  // <0: keep the configured value
        auto add_common = [&](CLI::App* sub, bool with_lambda = true) {
            sub->add_option("config", run.config_path, "system configuration file")->required();
            if (with_lambda)
                sub->add_option("--lambda-p", lambda_p, "override the configured PU arrival rate");
        };
        auto add_objective = [&](CLI::App* sub) {
            sub->add_option("--objective", objective_kind, "sum|log|weighted (default sum)");
            sub->add_option("--weights", weights_csv, "comma list, for --objective weighted");
            sub->add_option("--log-delta", log_delta, "offset of the log utility");
        };

        auto* c_validate = app.add_subcommand("validate", "check a configuration file");
        add_common(c_validate, false);

        auto* c_stability = app.add_subcommand("stability", "largest stabilizable PU arrival rate");
        add_common(c_stability, false);

        auto* c_solve = app.add_subcommand("solve", "centralized policy optimization");
        add_common(c_solve);
        add_objective(c_solve);

        std::string su_arrivals_csv;
        auto* c_thr = app.add_subcommand("throughput", "exogenous-arrival optimization");
        add_common(c_thr);
        add_objective(c_thr);
        c_thr->add_option("--su-arrivals", su_arrivals_csv, "comma list of SU arrival rates")
            ->required();

        AdmmOptions admm_opt;
        std::string warm_path;
        auto* c_admm = app.add_subcommand("admm", "distributed policy optimization");
        add_common(c_admm);
        add_objective(c_admm);
        c_admm->add_option("--rho", admm_opt.rho, "penalty parameter (default 0.1)");
        c_admm->add_option("--eps", admm_opt.epsilon, "local convergence accuracy (default 1e-5)");
        c_admm->add_option("--max-iters", admm_opt.max_iterations, "iteration cap");
        c_admm->add_option("--warm-start", warm_path, "solver state file from a previous run");

        SensingModel sensing_model;
        std::string search_mode = "grid";
        SensingSearch search;
        auto* c_sense = app.add_subcommand("sensing", "imperfect-sensing optimization");
        add_common(c_sense);
        add_objective(c_sense);
        c_sense->add_option("--pd", sensing_model.p_detect, "detection probability")->required();
        c_sense->add_option("--pf", sensing_model.p_false_alarm, "false-alarm probability")->required();
        c_sense->add_option("--search", search_mode, "grid|ternary (default grid)");
        c_sense->add_option("--grid-points", search.grid_points, "grid resolution (default 201)");
        c_sense->add_option("--eps-qb", search.eps_qb, "ternary interval width");

        std::string policy_path, admission_csv, pu_law = "bernoulli", su_law = "bernoulli";
        SimConfig sim_cfg;
        auto* c_sim = app.add_subcommand("simulate", "run the slot-level simulator");
        add_common(c_sim);
        c_sim->add_option("--policy", policy_path, "policy CSV to execute")->required();
        c_sim->add_option("--slots", sim_cfg.horizon, "horizon in slots (default 1e6)");
        c_sim->add_option("--seed", sim_cfg.seed, "RNG seed (default 1)");
        c_sim->add_option("--warmup", sim_cfg.warmup_fraction, "warmup fraction (default 0.05)");
        c_sim->add_option("--pu-law", pu_law, "bernoulli|poisson for PU arrivals");
        c_sim->add_option("--su-law", su_law, "bernoulli|poisson for SU arrivals");
        auto* pd_opt = c_sim->add_option("--pd", sensing_model.p_detect, "detection probability");
        c_sim->add_option("--pf", sensing_model.p_false_alarm, "false-alarm probability");
        c_sim->add_option("--su-arrivals", su_arrivals_csv,
                          "comma list of SU arrival rates (default: backlogged)");
        c_sim->add_option("--admission", admission_csv,
                          "comma list of admission probabilities, or 'auto'");

        std::string grid_text, policy_mode = "opt0";
        auto* c_scan = app.add_subcommand("scan", "sweep the PU arrival rate and simulate");
        add_common(c_scan, false);
        c_scan->add_option("--lambda-grid", grid_text, "a:b:step or comma list")->required();
        c_scan->add_option("--slots", sim_cfg.horizon, "horizon per grid point");
        c_scan->add_option("--seed", sim_cfg.seed, "base RNG seed");
        c_scan->add_option("--policy-mode", policy_mode, "opt0|nocoop (default opt0)");

        std::size_t num_directions = 33;
        std::uint64_t dir_seed = 1;
        auto* c_region = app.add_subcommand("region", "achievable-rate-region boundary sweep");
        add_common(c_region);
        c_region->add_option("--directions", num_directions, "number of weight directions");
        c_region->add_option("--seed", dir_seed, "seed for directions when |S| > 2");

        app.parse(argc, argv);

        CLI::App* sub = app.get_subcommands().front();
        run.command = sub->get_name();

        auto apply_lambda = [&](SystemParams& p) {
            if (lambda_p >= 0.0) p.pu_arrival_rate = lambda_p;
            run.options["lambda_p"] = p.pu_arrival_rate;
        };

        if (run.command == "validate") {
            run.config_text = read_file(run.config_path);
            const SystemParams p = parse_system_params(run.config_text);
            const auto issues = validate(p);
            if (issues.empty()) {
                std::cout << "ok\n";
                return kOk;
            }
            for (const auto& m : issues) std::cout << "violation: " << m << "\n";
            return kBadConfig;
        }

        if (run.command == "stability") {
            SystemParams p = run.load_params();
            const StabilityCertificate cert = max_stable_rate_certificate(p);
            std::cout << "lambda_hat = " << format_double(cert.lambda_hat) << "\n";
            std::ostringstream os;
            os << "lambda_hat = " << format_double(cert.lambda_hat) << "\n";
            os << "lp_iterations = " << cert.lp.iterations << "\n";
            os << "power_row_duals = " << vec_line(cert.lp.dual_ub) << "\n";
            run.emit("stability.txt", os.str());
            std::ostringstream csv;
            csv << "su,level,coop_mass\n";
            for (std::size_t s = 0; s < cert.coop_mass.size(); ++s)
                for (std::size_t i = 0; i < cert.coop_mass[s].size(); ++i)
                    csv << s << "," << i << "," << format_double(cert.coop_mass[s][i]) << "\n";
            run.emit("stability_certificate.csv", csv.str());
            run.finish();
            return kOk;
        }

        if (run.command == "solve") {
            SystemParams p = run.load_params();
            apply_lambda(p);
            const Objective obj = make_objective(objective_kind, weights_csv, p.num_sus(), log_delta);
            run.options["objective"] = objective_kind;
            const SolveReport rep = solve_policy(p, obj);
            require_solved(rep.status);
            run.emit("report.txt", solve_report_text(rep));
            run.emit("policy.csv", policy_to_csv(rep.policy));
            run.emit("policy.txt", policy_to_text(rep.policy));
            run.finish();
            std::cout << "objective = " << format_double(rep.objective) << "\n";
            return kOk;
        }

        if (run.command == "throughput") {
            SystemParams p = run.load_params();
            apply_lambda(p);
            const auto arrivals = parse_csv_list(su_arrivals_csv, "--su-arrivals");
            if (arrivals.size() != p.num_sus())
                throw ConfigError("--su-arrivals: need one rate per SU");
            const Objective obj = make_objective(objective_kind, weights_csv, p.num_sus(), log_delta);
            run.options["objective"] = objective_kind;
            run.options["su_arrivals"] = arrivals;
            const SolveReport rep = solve_throughput(p, arrivals, obj);
            require_solved(rep.status);
            run.emit("report.txt", solve_report_text(rep));
            run.emit("policy.csv", policy_to_csv(rep.policy));
            run.emit("policy.txt", policy_to_text(rep.policy));
            run.finish();
            std::cout << "objective = " << format_double(rep.objective) << "\n";
            return kOk;
        }

        if (run.command == "admm") {
            SystemParams p = run.load_params();
            apply_lambda(p);
            const Objective obj = make_objective(objective_kind, weights_csv, p.num_sus(), log_delta);
            run.options["objective"] = objective_kind;
            run.options["rho"] = admm_opt.rho;
            run.options["eps"] = admm_opt.epsilon;
            run.options["warm_start"] = warm_path;
            std::optional<AdmmState> warm;
            if (!warm_path.empty()) warm = admm_state_from_text(read_file(warm_path));
            const AdmmResult res = admm_solve(p, obj, admm_opt, warm ? &*warm : nullptr);

            std::ostringstream os;
            os << "status = " << to_string(res.status) << "\n";
            os << "objective = " << format_double(res.objective) << "\n";
            os << "iterations = " << res.iterations << "\n";
            os << "guard_delays = " << res.guard_delays << "\n";
            os << "su_rate = " << vec_line(res.su_rate) << "\n";
            os << "su_power = " << vec_line(res.su_power) << "\n";
            os << "messages_per_iteration = " << (res.iterations ? res.log.data_count(0) : 0) << "\n";
            run.emit("report.txt", os.str());
            run.emit("policy.csv", policy_to_csv(res.policy));
            run.emit("policy.txt", policy_to_text(res.policy));
            run.emit("solver_state.txt", admm_state_to_text(res.state));
            std::ostringstream trace;
            trace << "iteration,objective,max_residual\n";
            for (std::size_t k = 0; k < res.objective_trace.size(); ++k)
                trace << k << "," << format_double(res.objective_trace[k]) << ","
                      << format_double(res.residual_trace[k]) << "\n";
            run.emit("trace.csv", trace.str());
            run.finish();
            std::cout << "objective = " << format_double(res.objective) << " after "
                      << res.iterations << " iterations\n";
            if (res.status != SolveStatus::optimal)
                throw ConvergenceError("admm did not converge within the iteration cap");
            return kOk;
        }

        if (run.command == "sensing") {
            SystemParams p = run.load_params();
            apply_lambda(p);
            const Objective obj = make_objective(objective_kind, weights_csv, p.num_sus(), log_delta);
            if (search_mode == "ternary")
                search.mode = SensingSearch::Mode::ternary;
            else if (search_mode != "grid")
                throw ConfigError("--search must be grid or ternary");
            run.options["pd"] = sensing_model.p_detect;
            run.options["pf"] = sensing_model.p_false_alarm;
            run.options["search"] = search_mode;
            const SensingSolveReport rep = solve_sensing(p, sensing_model, obj, search);
            if (rep.status != SolveStatus::optimal)
                throw InfeasibleError("no feasible busy probability carries this arrival rate");
            const QbInterval box = qb_bounds(p, sensing_model);
            std::ostringstream os;
            os << "status = " << to_string(rep.status) << "\n";
            os << "q_b_star = " << format_double(rep.q_b_star) << "\n";
            os << "value = " << format_double(rep.value) << "\n";
            os << "qb_lo = " << format_double(box.lo) << "\n";
            os << "qb_hi = " << format_double(box.hi) << "\n";
            os << "concavity_triples = " << rep.concavity_triples << "\n";
            os << "concavity_violations = " << rep.concavity_violations << "\n";
            if (!box.diagnostic.empty()) os << "diagnostic = " << box.diagnostic << "\n";
            run.emit("report.txt", os.str());
            std::ostringstream csv;
            csv << "q_b,feasible,value\n";
            for (const auto& pt : rep.curve)
                csv << format_double(pt.q_b) << "," << (pt.feasible ? 1 : 0) << ","
                    << format_double(pt.value) << "\n";
            run.emit("curve.csv", csv.str());
            const JointPolicy sensing_joint = to_joint(rep.policy);
            run.emit("policy.csv", policy_to_csv(sensing_joint));
            run.emit("policy.txt", policy_to_text(sensing_joint));
            run.finish();
            std::cout << "q_b* = " << format_double(rep.q_b_star)
                      << ", value = " << format_double(rep.value) << "\n";
            return kOk;
        }

        if (run.command == "simulate") {
            SystemParams p = run.load_params();
            apply_lambda(p);
            const JointPolicy joint = load_policy_csv(policy_path);
            const ConditionalPolicy pol = to_conditional(joint);
            sim_cfg.pu_arrival.law =
                pu_law == "poisson" ? ArrivalSpec::Law::poisson : ArrivalSpec::Law::bernoulli;
            sim_cfg.pu_arrival.rate = p.pu_arrival_rate;
            if (pd_opt->count() > 0) sim_cfg.sensing = sensing_model;
            std::vector<double> arrivals;
            if (!su_arrivals_csv.empty()) {
                arrivals = parse_csv_list(su_arrivals_csv, "--su-arrivals");
                if (arrivals.size() != p.num_sus())
                    throw ConfigError("--su-arrivals: need one rate per SU");
                std::vector<ArrivalSpec> specs;
                const auto law =
                    su_law == "poisson" ? ArrivalSpec::Law::poisson : ArrivalSpec::Law::bernoulli;
                for (double a : arrivals) specs.push_back(ArrivalSpec{law, a});
                sim_cfg.su_arrivals = specs;
            }
            if (!admission_csv.empty()) {
                if (admission_csv == "auto") {
                    if (arrivals.empty()) throw ConfigError("--admission auto needs --su-arrivals");
                    const auto offered = su_rates(pol, p);
                    std::vector<double> adm(p.num_sus(), 1.0);
                    for (std::size_t s = 0; s < p.num_sus(); ++s)
                        if (arrivals[s] > 0.0) adm[s] = std::min(arrivals[s], offered[s]) / arrivals[s];
                    sim_cfg.admission = adm;
                } else {
                    sim_cfg.admission = parse_csv_list(admission_csv, "--admission");
                }
            }
            run.options["policy"] = policy_path;
            run.options["slots"] = sim_cfg.horizon;
            run.options["seed"] = sim_cfg.seed;
            const SimReport rep = simulate(p, pol, sim_cfg);
            run.emit("sim_report.txt", sim_report_text(rep));
            run.finish();
            std::cout << "busy_fraction = " << format_double(rep.busy_fraction)
                      << ", backlog/T = " << format_double(rep.backlog_over_horizon) << "\n";
            return kOk;
        }

        if (run.command == "scan") {
            SystemParams p = run.load_params();
            const auto grid = parse_grid(grid_text);
            run.options["lambda_grid"] = grid;
            run.options["policy_mode"] = policy_mode;
            run.options["slots"] = sim_cfg.horizon;
            run.options["seed"] = sim_cfg.seed;
            sim_cfg.pu_arrival.law = ArrivalSpec::Law::bernoulli;
            std::function<ConditionalPolicy(double)> factory;
            if (policy_mode == "nocoop") {
                factory = [&p](double) { return no_cooperation_policy(p); };
            } else if (policy_mode == "opt0") {
                factory = [&p](double lam) {
                    SystemParams at = p;
                    at.pu_arrival_rate = lam;
                    const SolveReport rep = solve_policy(at, Objective::sum_rate(p.num_sus()));
                    if (rep.status != SolveStatus::optimal)
                        throw InfeasibleError("unstable arrival rate");
                    return to_conditional(rep.policy);
                };
            } else {
                throw ConfigError("--policy-mode must be opt0 or nocoop");
            }
            const auto rows = stability_scan(p, factory, grid, sim_cfg);
            std::ostringstream csv;
            csv << "lambda_p,solved,analytic_objective,analytic_busy_prob,sum_throughput,"
                   "busy_fraction,mean_backlog,backlog_over_horizon,max_su_power\n";
            for (const auto& r : rows)
                csv << format_double(r.lambda_p) << "," << (r.solved ? 1 : 0) << ","
                    << format_double(r.analytic_objective) << ","
                    << format_double(r.analytic_busy_prob) << "," << format_double(r.sum_throughput)
                    << "," << format_double(r.busy_fraction) << "," << format_double(r.mean_backlog)
                    << "," << format_double(r.backlog_over_horizon) << ","
                    << format_double(r.max_su_power) << "\n";
            run.emit("scan.csv", csv.str());
            run.finish();
            return kOk;
        }

        if (run.command == "region") {
            SystemParams p = run.load_params();
            apply_lambda(p);
            std::vector<std::vector<double>> dirs;
            if (p.num_sus() == 2) {
                for (std::size_t k = 0; k < num_directions; ++k) {
                    const double t = 1.5707963267948966 * static_cast<double>(k) /
                                     static_cast<double>(std::max<std::size_t>(num_directions - 1, 1));
                    dirs.push_back({std::sin(t) + 1e-12, std::cos(t) + 1e-12});
                }
            } else {
                std::mt19937_64 rng(dir_seed);
                std::uniform_real_distribution<double> u(0.0, 1.0);
                for (std::size_t s = 0; s < p.num_sus(); ++s) {
                    std::vector<double> axis(p.num_sus(), 1e-12);
                    axis[s] = 1.0;
                    dirs.push_back(axis);
                }
                while (dirs.size() < num_directions) {
                    std::vector<double> w(p.num_sus());
                    double total = 0.0;
                    for (auto& v : w) {
                        v = u(rng);
                        total += v;
                    }
                    for (auto& v : w) v /= total;
                    dirs.push_back(w);
                }
            }
            run.options["directions"] = dirs.size();
            const auto points = rate_region_boundary(p, p.pu_arrival_rate, dirs);
            std::ostringstream csv;
            for (std::size_t s = 0; s < p.num_sus(); ++s) csv << "w" << s << ",";
            for (std::size_t s = 0; s < p.num_sus(); ++s) csv << "r" << s << ",";
            csv << "value\n";
            for (const auto& pt : points) {
                for (double w : pt.weights) csv << format_double(w) << ",";
                for (double r : pt.rates) csv << format_double(r) << ",";
                csv << format_double(pt.value) << "\n";
            }
            run.emit("region.csv", csv.str());
            run.finish();
            return kOk;
        }

        std::cerr << "unknown command\n";
        return kBadConfig;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kBadConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadConfig;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const ConvergenceError& e) {
        std::cerr << "not converged: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kNumericFailure;
    }
}
