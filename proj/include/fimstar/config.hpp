#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fimstar/agent.hpp"

namespace fimstar {

enum class SweepKind { none, power, sinr_min, ris_elements };
enum class SweepMode { retrain, eval_only };

std::string_view sweep_name(SweepKind kind);
/// Grid used when sweep.kind is set without sweep.grid.
std::vector<double> default_grid(SweepKind kind);

struct SweepConfig {
    SweepKind kind = SweepKind::none;
    std::vector<double> grid;
    SweepMode mode = SweepMode::retrain;
    std::filesystem::path checkpoint;  // eval_only: policy to evaluate at every point
};

struct ExperimentConfig {
    std::string profile = "table1";
    EnvConfig scenario;
    Td3Params td3;
    MetaParams meta;
    std::vector<AgentKind> agents{AgentKind::meta_td3};
    SweepConfig sweep;
    std::vector<std::uint64_t> seeds{1};
    int episodes = 500;
    int eval_draws = 100;
    std::filesystem::path output_dir = "out";
    int jobs = 1;

    /// Throws ConfigError(invalid) naming the offending key.
    void validate() const;
};

/// Defaults of a named profile: "table1" (full scale) or "desk".
ExperimentConfig profile_defaults(const std::string& name);

class ConfigError : public std::runtime_error {
public:
    enum class Kind { missing_file, parse, unknown_key, invalid };
    ConfigError(Kind kind, const std::string& message);
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Parses `section.key = value` lines. `#` starts a comment; lists are
/// comma-separated. `run.profile` is applied before every other key
/// regardless of where it appears.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its value, one per line, in a fixed order.
std::string dump_config(const ExperimentConfig& cfg);

/// FNV-1a over the dump, excluding keys that cannot change results
/// (output directory, job count).
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hex64(std::uint64_t v);

/// Trainer setup for one (agent, seed) pair of the experiment.
TrainerSetup trainer_setup(const ExperimentConfig& cfg, AgentKind kind, std::uint64_t seed);

}  // namespace fimstar
