// SPDX-License-Identifier: Apache-2.0
//
// bsvrg — Byzantine-resilient variance-reduced optimization simulator.
// Subcommands: run, sweep, tune, verify.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsvrg/engine.hpp"
#include "bsvrg/sweep.hpp"
#include "bsvrg/trace.hpp"
#include "bsvrg/tuning.hpp"
#include "bsvrg/verification.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;        // invalid/infeasible hyperparameters
constexpr int kExitHonestMajority = 3;    // filter found no majority ball

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const bsvrg::ParseResult parsed = bsvrg::parse_config_file(config_path);
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors) std::cerr << "config error: " << e << "\n";
        return kExitInfeasible;
    }
    bsvrg::RunConfig cfg = *parsed.config;
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    const auto problem = bsvrg::make_problem(cfg.problem);
    bsvrg::Engine engine(cfg, *problem);
    const bsvrg::RunResult result = engine.run();

    const auto artifacts = bsvrg::persist_run(bsvrg::resolve_output_dir(cfg), cfg, result);
    std::cout << "status: " << bsvrg::run_status_name(result.status) << "\n";
    if (!result.diagnostic.empty()) std::cout << "diagnostic: " << result.diagnostic << "\n";
    std::cout << "epochs: " << result.trace.records.size() << "\n"
              << "min ||grad f||^2: " << bsvrg::format_double(result.min_grad_norm_sq) << "\n"
              << "server samples: " << result.total_server_samples << "\n"
              << "worker samples: " << result.total_worker_samples << "\n"
              << "trace: " << artifacts.trace_path << "\n"
              << "summary: " << artifacts.summary_path << "\n";
    if (result.status == bsvrg::RunStatus::honest_majority_violation) return kExitHonestMajority;
    return kExitOk;  // divergence is a result, not an error
}

int cmd_sweep(const std::string& grid_path, const std::string& out_dir, unsigned threads,
              const std::string& name) {
    std::ifstream in(grid_path);
    if (!in) {
        std::cerr << "cannot open grid file: " << grid_path << "\n";
        return kExitInfeasible;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const auto rows = bsvrg::run_sweep(ss.str(), threads);

    const std::string dir = out_dir.empty() ? "." : out_dir;
    const std::string path = dir + "/" + name + "_sweep.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write sweep file: " << path << "\n";
        return 1;
    }
    bsvrg::write_sweep_csv(out, rows);
    std::cout << "rows: " << rows.size() << "\n" << "sweep: " << path << "\n";
    return kExitOk;
}

int cmd_tune(const std::string& config_path) {
    const bsvrg::ParseResult parsed = bsvrg::parse_config_file(config_path);
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors) std::cerr << "config error: " << e << "\n";
        return kExitInfeasible;
    }
    const bsvrg::RunConfig& cfg = *parsed.config;
    if (!cfg.epsilon_target) {
        std::cerr << "tune requires epsilon_target in the config\n";
        return kExitInfeasible;
    }
    const auto problem = bsvrg::make_problem(cfg.problem);
    const bsvrg::Vec x0 = cfg.initial_point.empty()
                              ? bsvrg::Vec(problem->dimension(), 1.0)
                              : cfg.initial_point;
    const double f_gap = problem->objective(x0) - problem->optimum_value_lower_bound();

    const bsvrg::HyperParams schedule =
        bsvrg::suggest_schedule(*cfg.epsilon_target, cfg.worker_count, cfg.alpha,
                                problem->smoothness(), problem->deviation_bound(), f_gap);
    const bsvrg::ConstraintReport verdicts =
        bsvrg::validate(schedule.worker_count, schedule.batch_size, schedule.delta);

    nlohmann::json j;
    j["epsilon_target"] = schedule.epsilon_target;
    j["K"] = schedule.worker_count;
    j["alpha"] = schedule.alpha;
    j["B"] = schedule.batch_size;
    j["T"] = schedule.epoch_count;
    j["eta"] = schedule.eta;
    j["delta"] = schedule.delta;
    j["C"] = schedule.concentration;
    j["T_mu"] = schedule.rule1_radius;
    j["f_gap"] = f_gap;
    j["bound_value"] = schedule.bound_value;
    j["feasible"] = schedule.feasible();
    j["violations"] = schedule.violations;
    j["constraints"] = {
        {"window_lower", verdicts.window_lower},
        {"window_upper", verdicts.window_upper},
        {"delta_cap", verdicts.delta_cap},
        {"lower_exponent", verdicts.lower_exponent},
        {"log_ratio", verdicts.log_ratio},
        {"half_batch", verdicts.half_batch},
        {"delta_limit", verdicts.delta_limit},
    };
    std::cout << j.dump(2) << "\n";
    return schedule.feasible() ? kExitOk : kExitInfeasible;
}

struct VerifyOptions {
    std::vector<std::string> lemmas{"all"};
    std::int64_t trials = 0;  // 0 = per-lemma default
    std::uint64_t seed = 1;
    int workers = 10;
    int batch = 64;
    double delta = 6.25e-5;
    double alpha = 0.0;
    std::string attack = "none";
    double magnitude = 0.0;
    int dimension = 5;
    double noise_bound = 1.0;
    double ratio = 0.5;
    int steps = 100;
    double bound_m = 1.0;
    double pinelis_delta = 0.01;
    std::string json_path;
};

int cmd_verify(const VerifyOptions& opt) {
    auto wants = [&](const std::string& name) {
        for (const auto& l : opt.lemmas) {
            if (l == "all" || l == name) return true;
        }
        return false;
    };

    const bsvrg::QuadraticProblem problem(static_cast<std::size_t>(opt.dimension),
                                          bsvrg::Vec(static_cast<std::size_t>(opt.dimension), 0.0),
                                          opt.noise_bound);
    const bsvrg::Vec x(static_cast<std::size_t>(opt.dimension), 1.0);

    std::vector<bsvrg::LemmaCheckReport> reports;
    if (wants("concentration")) {
        reports.push_back(bsvrg::check_concentration(
            problem, x, opt.workers, opt.batch, opt.delta,
            opt.trials > 0 ? opt.trials : 100000, opt.seed));
    }
    if (wants("error_moment")) {
        bsvrg::ErrorMomentScenario scenario;
        scenario.problem = &problem;
        scenario.x = x;
        scenario.worker_count = opt.workers;
        scenario.alpha = opt.alpha;
        scenario.batch_size = opt.batch;
        scenario.delta = opt.delta;
        if (opt.attack != "none") {
            bsvrg::AttackSpec spec;
            const auto strat = bsvrg::parse_attack_strategy(opt.attack);
            if (!strat) {
                std::cerr << "unknown attack strategy: " << opt.attack << "\n";
                return kExitInfeasible;
            }
            spec.strategy = *strat;
            spec.magnitude = opt.magnitude;
            spec.knowledge = bsvrg::requires_omniscient(*strat)
                                 ? bsvrg::AttackKnowledge::omniscient
                                 : bsvrg::AttackKnowledge::blind;
            scenario.attack = spec;
        }
        reports.push_back(bsvrg::check_error_moment(
            scenario, opt.trials > 0 ? opt.trials : 10000, opt.seed));
    }
    if (wants("geom_telescope")) {
        bsvrg::SequenceSpec seq;
        seq.kind = bsvrg::SequenceSpec::Kind::geometric;
        seq.ratio = opt.ratio;
        reports.push_back(bsvrg::check_geom_telescope(
            opt.batch, seq, opt.trials > 0 ? opt.trials : 1000000, opt.seed));
    }
    if (wants("pinelis")) {
        reports.push_back(bsvrg::check_pinelis(opt.bound_m, opt.steps, opt.dimension,
                                               opt.pinelis_delta,
                                               opt.trials > 0 ? opt.trials : 100000, opt.seed));
    }

    nlohmann::json all = nlohmann::json::array();
    bool ok = true;
    for (const auto& r : reports) {
        const auto j = bsvrg::lemma_report_json(r);
        std::cout << j.dump(2) << "\n";
        all.push_back(j);
        ok = ok && r.pass;
    }
    if (!opt.json_path.empty()) {
        std::ofstream out(opt.json_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write " << opt.json_path << "\n";
            return 1;
        }
        out << all.dump(2) << "\n";
    }
    return ok ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Byzantine-resilient distributed SVRG simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "execute one configured run");
    run->add_option("config", config_path, "run config file")->required();
    run->add_option("--out", out_dir, "output directory");

    std::string grid_path;
    std::string sweep_out;
    std::string sweep_name = "sweep";
    unsigned threads = 0;
    auto* sweep = app.add_subcommand("sweep", "run a config grid");
    sweep->add_option("grid", grid_path, "grid config file")->required();
    sweep->add_option("--out", sweep_out, "output directory");
    sweep->add_option("--threads", threads, "worker threads (0 = hardware)");
    sweep->add_option("--name", sweep_name, "output file prefix");

    std::string tune_path;
    auto* tune = app.add_subcommand("tune", "suggest a (B, T, delta) schedule");
    tune->add_option("config", tune_path, "run config file with epsilon_target")->required();

    VerifyOptions vopt;
    auto* verify = app.add_subcommand("verify", "Monte Carlo lemma checks");
    verify->add_option("--lemma", vopt.lemmas,
                       "all|concentration|error_moment|geom_telescope|pinelis");
    verify->add_option("--trials", vopt.trials, "trial count (0 = per-lemma default)");
    verify->add_option("--seed", vopt.seed, "root seed");
    verify->add_option("--workers", vopt.workers, "K");
    verify->add_option("--batch", vopt.batch, "B");
    verify->add_option("--delta", vopt.delta, "delta");
    verify->add_option("--alpha", vopt.alpha, "Byzantine fraction (error_moment)");
    verify->add_option("--attack", vopt.attack, "attack strategy (error_moment)");
    verify->add_option("--magnitude", vopt.magnitude, "attack magnitude");
    verify->add_option("--dimension", vopt.dimension, "problem dimension");
    verify->add_option("--noise-bound", vopt.noise_bound, "deviation bound V");
    verify->add_option("--ratio", vopt.ratio, "telescope sequence ratio");
    verify->add_option("--steps", vopt.steps, "pinelis walk length N");
    verify->add_option("--bound-m", vopt.bound_m, "pinelis step bound M");
    verify->add_option("--pinelis-delta", vopt.pinelis_delta, "pinelis confidence");
    verify->add_option("--json", vopt.json_path, "write reports to a JSON file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir);
        if (sweep->parsed()) return cmd_sweep(grid_path, sweep_out, threads, sweep_name);
        if (tune->parsed()) return cmd_tune(tune_path);
        if (verify->parsed()) return cmd_verify(vopt);
    } catch (const bsvrg::HonestMajorityViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitHonestMajority;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
