#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fimstar/config.hpp"

namespace fimstar {

/// Shortest decimal that round-trips to the same double.
std::string format_number(double v);

/// Scenario of one sweep point: the swept field replaced by `value`.
EnvConfig sweep_scenario(const ExperimentConfig& cfg, double value);

/// Trailing mean over the last `window` entries (fewer at the start).
std::vector<double> trailing_mean(const std::vector<double>& x, int window);

struct ConvergenceRow {
    AgentKind agent;
    std::uint64_t seed;
    int episode;
    double episode_reward;
    double smoothed_reward;
};

struct SweepRow {
    AgentKind agent;
    std::uint64_t seed;
    double sweep_value;
    double mean_sum_rate;
    double std_err;  // over evaluation draws; not written to the CSV
};

struct RunOptions {
    /// When set, each trained agent is checkpointed as
    /// <dir>/<agent>_seed<seed>.ckpt (convergence runs only).
    std::filesystem::path checkpoint_dir;
};

inline constexpr int kSmoothingWindow = 20;

/// Trains every (agent, seed) pair for cfg.episodes episodes.
/// Rows are ordered by agent (config order), seed (list order), episode.
std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// For every (agent, seed, grid point): retrain and evaluate, or evaluate the
/// configured checkpoint in eval_only mode. Rows ordered by agent, seed, grid.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

std::string convergence_csv(const ExperimentConfig& cfg, const std::vector<ConvergenceRow>& rows);
std::string sweep_csv(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows);

/// Writes `text` to `path` atomically (temp file + rename), creating parents.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fimstar
