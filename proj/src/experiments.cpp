#include "fimstar/experiments.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <thread>

namespace fimstar {

namespace {

// Runs tasks [0, count) on up to `jobs` threads. Each task writes only its
// own output slot, so the result does not depend on scheduling.
void run_jobs(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) {
        t.join();
    }
    for (const std::exception_ptr& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::string seed_list(const ExperimentConfig& cfg) {
    std::string out;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        out += (i ? ";" : "") + std::to_string(cfg.seeds[i]);
    }
    return out;
}

std::string sweep_unit(SweepKind kind) {
    switch (kind) {
        case SweepKind::power:
            return "dBm";
        case SweepKind::sinr_min:
            return "dB";
        case SweepKind::ris_elements:
            return "elements";
        case SweepKind::none:
            break;
    }
    return "";
}

std::string metadata_line(const ExperimentConfig& cfg, const std::string& experiment, const std::string& units) {
    return "# fimstar experiment=" + experiment + " config_hash=" + hex64(config_hash(cfg)) +
           " profile=" + cfg.profile + " seeds=" + seed_list(cfg) + " units=" + units + "\n";
}

}  // namespace

std::string format_number(double v) {
    if (v == 0.0) {
        return "0";  // folds -0
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

EnvConfig sweep_scenario(const ExperimentConfig& cfg, double value) {
    EnvConfig env = cfg.scenario;
    switch (cfg.sweep.kind) {
        case SweepKind::power:
            env.p_max_dbm = value;
            break;
        case SweepKind::sinr_min:
            env.gamma_min_db = {value};
            break;
        case SweepKind::ris_elements:
            env.elements = static_cast<int>(value);
            break;
        case SweepKind::none:
            break;
    }
    return env;
}

std::vector<double> trailing_mean(const std::vector<double>& x, int window) {
    if (window < 1) {
        throw DomainError("trailing_mean: window must be positive");
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t lo = i + 1 > static_cast<std::size_t>(window) ? i + 1 - static_cast<std::size_t>(window) : 0;
        double sum = 0.0;
        for (std::size_t j = lo; j <= i; ++j) {
            sum += x[j];
        }
        out[i] = sum / static_cast<double>(i + 1 - lo);
    }
    return out;
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg, const RunOptions& opts) {
    cfg.validate();
    if (cfg.sweep.kind != SweepKind::none) {
        throw DomainError("run_convergence: sweep.kind must be none");
    }
    const std::size_t n_seeds = cfg.seeds.size();
    const std::size_t n_jobs = cfg.agents.size() * n_seeds;
    std::vector<std::vector<double>> rewards(n_jobs);
    run_jobs(n_jobs, cfg.jobs, [&](std::size_t j) {
        const AgentKind kind = cfg.agents[j / n_seeds];
        const std::uint64_t seed = cfg.seeds[j % n_seeds];
        Trainer trainer(trainer_setup(cfg, kind, seed));
        trainer.train(cfg.episodes);
        rewards[j] = trainer.log().episode_rewards;
        if (!opts.checkpoint_dir.empty()) {
            std::filesystem::create_directories(opts.checkpoint_dir);
            trainer.save(opts.checkpoint_dir /
                         (std::string(agent_name(kind)) + "_seed" + std::to_string(seed) + ".ckpt"));
        }
    });

    std::vector<ConvergenceRow> rows;
    for (std::size_t j = 0; j < n_jobs; ++j) {
        const std::vector<double> smooth = trailing_mean(rewards[j], kSmoothingWindow);
        for (std::size_t e = 0; e < rewards[j].size(); ++e) {
            rows.push_back({cfg.agents[j / n_seeds], cfg.seeds[j % n_seeds], static_cast<int>(e), rewards[j][e],
                            smooth[e]});
        }
    }
    return rows;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.sweep.kind == SweepKind::none) {
        throw DomainError("run_sweep: sweep.kind must be power, sinr_min or ris_elements");
    }
    const std::size_t n_points = cfg.sweep.grid.size();
    const std::size_t n_seeds = cfg.seeds.size();

    if (cfg.sweep.mode == SweepMode::eval_only) {
        const Trainer trainer = Trainer::load(cfg.sweep.checkpoint);
        std::vector<SweepRow> rows(n_seeds * n_points);
        run_jobs(rows.size(), cfg.jobs, [&](std::size_t j) {
            const std::uint64_t seed = cfg.seeds[j / n_points];
            const double value = cfg.sweep.grid[j % n_points];
            const EvalSummary ev = trainer.evaluate(cfg.eval_draws, seed, sweep_scenario(cfg, value));
            rows[j] = {trainer.kind(), seed, value, ev.mean, ev.std_err};
        });
        return rows;
    }

    const std::size_t per_agent = n_seeds * n_points;
    std::vector<SweepRow> rows(cfg.agents.size() * per_agent);
    run_jobs(rows.size(), cfg.jobs, [&](std::size_t j) {
        const AgentKind kind = cfg.agents[j / per_agent];
        const std::uint64_t seed = cfg.seeds[(j % per_agent) / n_points];
        const double value = cfg.sweep.grid[j % n_points];
        TrainerSetup setup = trainer_setup(cfg, kind, seed);
        setup.env = sweep_scenario(cfg, value);
        Trainer trainer(setup);
        trainer.train(cfg.episodes);
        const EvalSummary ev = trainer.evaluate(cfg.eval_draws, seed);
        rows[j] = {kind, seed, value, ev.mean, ev.std_err};
    });
    return rows;
}

std::string convergence_csv(const ExperimentConfig& cfg, const std::vector<ConvergenceRow>& rows) {
    std::string out = metadata_line(cfg, "convergence", "episode_reward:bit/s/Hz,smoothed_reward:bit/s/Hz");
    out += "agent,seed,episode,episode_reward,smoothed_reward\n";
    for (const ConvergenceRow& r : rows) {
        out += std::string(agent_name(r.agent)) + "," + std::to_string(r.seed) + "," + std::to_string(r.episode) +
               "," + format_number(r.episode_reward) + "," + format_number(r.smoothed_reward) + "\n";
    }
    return out;
}

std::string sweep_csv(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
    std::string out = metadata_line(cfg, std::string("sweep_") + std::string(sweep_name(cfg.sweep.kind)),
                                    "sweep_value:" + sweep_unit(cfg.sweep.kind) + ",mean_sum_rate:bit/s/Hz");
    out += "agent,seed,sweep_value,mean_sum_rate\n";
    for (const SweepRow& r : rows) {
        out += std::string(agent_name(r.agent)) + "," + std::to_string(r.seed) + "," + format_number(r.sweep_value) +
               "," + format_number(r.mean_sum_rate) + "\n";
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << text;
        if (!out.flush()) {
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace fimstar
