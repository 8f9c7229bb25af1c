// fimstar: command-line driver for training runs, sweeps and evaluation.

#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "fimstar/experiments.hpp"

namespace {

using namespace fimstar;

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool need_config) {
    auto* opt = cmd->add_option("--config", f.config, "Configuration file (section.key = value)");
    if (need_config) {
        opt->required();
    }
    cmd->add_option("--seed", f.seed, "Run with this single seed instead of run.seeds");
    cmd->add_option("--out", f.out, "Output directory (default: $FIMSTAR_OUT, then run.output_dir)");
    cmd->add_option("--jobs", f.jobs, "Parallel jobs (default: run.jobs)");
}

ExperimentConfig resolve(const CommonFlags& f) {
    ExperimentConfig cfg = f.config.empty() ? parse_config("") : load_config(f.config);
    if (f.seed) {
        cfg.seeds = {*f.seed};
    }
    if (f.jobs) {
        cfg.jobs = *f.jobs;
    }
    if (!f.out.empty()) {
        cfg.output_dir = f.out;
    } else if (const char* env = std::getenv("FIMSTAR_OUT"); env && *env) {
        cfg.output_dir = env;
    }
    cfg.validate();
    return cfg;
}

int cmd_train(const CommonFlags& f) {
    const ExperimentConfig cfg = resolve(f);
    if (cfg.sweep.kind != SweepKind::none) {
        std::cerr << "train: config has sweep.kind = " << sweep_name(cfg.sweep.kind) << "; use the sweep subcommand\n";
        return 2;
    }
    RunOptions opts;
    opts.checkpoint_dir = cfg.output_dir / "checkpoints";
    const auto rows = run_convergence(cfg, opts);
    const auto csv_path = cfg.output_dir / "convergence.csv";
    write_text_file(csv_path, convergence_csv(cfg, rows));
    write_text_file(cfg.output_dir / "config.txt", dump_config(cfg));

    for (AgentKind kind : cfg.agents) {
        for (std::uint64_t seed : cfg.seeds) {
            double last = 0.0;
            for (const ConvergenceRow& r : rows) {
                if (r.agent == kind && r.seed == seed) {
                    last = r.smoothed_reward;
                }
            }
            std::cout << agent_name(kind) << " seed " << seed << ": final smoothed reward " << format_number(last)
                      << "\n";
        }
    }
    std::cout << "wrote " << csv_path.string() << "\n";
    return 0;
}

int cmd_sweep(const CommonFlags& f) {
    const ExperimentConfig cfg = resolve(f);
    if (cfg.sweep.kind == SweepKind::none) {
        std::cerr << "sweep: config has sweep.kind = none; set sweep.kind and sweep.grid\n";
        return 2;
    }
    const auto rows = run_sweep(cfg);
    const auto csv_path = cfg.output_dir / ("sweep_" + std::string(sweep_name(cfg.sweep.kind)) + ".csv");
    write_text_file(csv_path, sweep_csv(cfg, rows));
    write_text_file(cfg.output_dir / "config.txt", dump_config(cfg));
    for (const SweepRow& r : rows) {
        std::cout << agent_name(r.agent) << " seed " << r.seed << " " << sweep_name(cfg.sweep.kind) << "="
                  << format_number(r.sweep_value) << ": mean sum rate " << format_number(r.mean_sum_rate) << "\n";
    }
    std::cout << "wrote " << csv_path.string() << "\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint, int draws, std::uint64_t seed) {
    const Trainer trainer = Trainer::load(checkpoint);
    const EvalSummary ev = trainer.evaluate(draws, seed);
    std::cout << "agent " << agent_name(trainer.kind()) << " episodes " << trainer.episodes_done() << "\n"
              << "mean_sum_rate " << format_number(ev.mean) << "\n"
              << "std_err " << format_number(ev.std_err) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fimstar: FIM + STAR-RIS downlink simulator and Meta-TD3 trainer"};
    app.require_subcommand(1);

    CommonFlags train_flags, sweep_flags, validate_flags;
    auto* train = app.add_subcommand("train", "Train the configured agents and write convergence.csv");
    add_common(train, train_flags, false);
    auto* sweep = app.add_subcommand("sweep", "Run the configured sweep and write sweep_<kind>.csv");
    add_common(sweep, sweep_flags, true);

    std::string checkpoint;
    int draws = 100;
    std::uint64_t eval_seed = 1;
    auto* eval = app.add_subcommand("eval", "Evaluate a saved checkpoint on fresh channel draws");
    eval->add_option("--checkpoint", checkpoint, "Checkpoint file written by train")->required();
    eval->add_option("--draws", draws, "Number of evaluation channel draws")->check(CLI::PositiveNumber);
    eval->add_option("--seed", eval_seed, "Evaluation seed");

    auto* validate = app.add_subcommand("validate-config", "Check a configuration file; silent on success");
    validate->add_option("--config", validate_flags.config, "Configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        std::cerr << app.help();
        return code == 0 ? 2 : code;
    }

    try {
        if (*train) {
            return cmd_train(train_flags);
        }
        if (*sweep) {
            return cmd_sweep(sweep_flags);
        }
        if (*eval) {
            return cmd_eval(checkpoint, draws, eval_seed);
        }
        if (*validate) {
            (void)load_config(validate_flags.config);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
