#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fimstar/env.hpp"
#include "fimstar/td3.hpp"

namespace fimstar {

enum class AgentKind { td3, meta_td3, random };

std::string_view agent_name(AgentKind kind);
/// Throws DomainError for unknown names.
AgentKind parse_agent(std::string_view name);

/// Losses of one update step; NaN where the step skipped that update.
struct StepLosses {
    double critic1 = 0.0;
    double critic2 = 0.0;
    double actor = 0.0;
    double meta = 0.0;
};

struct TrainingLog {
    std::vector<double> episode_rewards;
    std::vector<StepLosses> losses;  // one entry per update step
    std::int64_t env_steps = 0;
    std::int64_t update_steps = 0;
    std::int64_t actor_updates = 0;
    std::int64_t meta_updates = 0;
};

struct EvalSummary {
    std::vector<double> sum_rates;  // clamped sum rate per evaluation draw
    double mean = 0.0;
    double std_err = 0.0;
};

/// Everything needed to rebuild a trainer from scratch.
struct TrainerSetup {
    EnvConfig env;
    AgentKind kind = AgentKind::meta_td3;
    Td3Params td3;
    MetaParams meta;
    std::uint64_t seed = 1;
};

/// Off-policy training loop for one agent on one environment.
///
/// All randomness flows from the seed through labelled sub-streams
/// (channels, initialization, exploration, replay sampling, target noise),
/// so a run is a pure function of its setup.
class Trainer {
public:
    explicit Trainer(TrainerSetup setup);

    const TrainerSetup& setup() const { return setup_; }
    AgentKind kind() const { return setup_.kind; }
    const TrainingLog& log() const { return log_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    const Mlp& actor() const { return actor_; }
    const Mlp& critic1() const { return critic1_; }
    const Mlp& critic2() const { return critic2_; }
    const Mlp& meta_critic() const { return meta_.net; }
    int episodes_done() const { return static_cast<int>(log_.episode_rewards.size()); }

    /// Runs one full episode (reset + episode_len steps) and returns its reward.
    double run_episode();
    void train(int episodes);

    /// Deterministic policy output (no exploration noise).
    ActionVec policy(const StateVec& state) const;

    /// Mean clamped sum rate of the deterministic policy over `draws` fresh
    /// channel realizations, one action per realization. The random agent
    /// draws uniform actions instead.
    EvalSummary evaluate(int draws, std::uint64_t eval_seed) const;
    /// Same, on a different scenario with identical state and action sizes.
    EvalSummary evaluate(int draws, std::uint64_t eval_seed, const EnvConfig& scenario) const;

    void save(const std::filesystem::path& path) const;
    static Trainer load(const std::filesystem::path& path);

private:
    ActionVec behaviour_action(const StateVec& state);
    void update();

    TrainerSetup setup_;
    Env env_;
    Mlp actor_, actor_target_;
    Mlp critic1_, critic1_target_;
    Mlp critic2_, critic2_target_;
    Adam actor_opt_, critic1_opt_, critic2_opt_;
    MetaCritic meta_;
    ReplayBuffer buffer_;
    PrngStream explore_rng_;
    PrngStream sample_rng_;
    PrngStream noise_rng_;
    TrainingLog log_;

    friend struct CheckpointIo;
};

/// Trains a fresh agent for `episodes` episodes.
TrainingLog train(const TrainerSetup& setup, int episodes);

/// Stream labels used to derive the trainer's sub-streams from the seed.
namespace streams {
inline constexpr std::uint64_t channels = 1;
inline constexpr std::uint64_t init = 2;
inline constexpr std::uint64_t explore = 3;
inline constexpr std::uint64_t sample = 4;
inline constexpr std::uint64_t target_noise = 5;
inline constexpr std::uint64_t evaluation = 6;
}  // namespace streams

}  // namespace fimstar
