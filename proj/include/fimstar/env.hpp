#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fimstar/fbl_link.hpp"
#include "fimstar/fim_channel.hpp"
#include "fimstar/numerics.hpp"
#include "fimstar/star_ris.hpp"

namespace fimstar {

using StateVec = std::vector<double>;
using ActionVec = std::vector<double>;

/// Thrown when an object is driven out of its lifecycle order.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Scenario of one environment. Per-user lists hold either a single
/// value (applied to every user) or one value per user.
struct EnvConfig {
    int p_y = 4;
    int p_z = 4;
    int elements = 400;  // surface elements F
    int users = 6;
    int paths = 16;
    double lambda = 0.1;    // metres
    double spacing = 0.05;  // antenna and surface element spacing, metres
    double x_max = 0.05;    // morphing range, metres

    double noise_dbm_per_hz = -22.2;
    double bandwidth_hz = 1.0;
    double eps = 1e-5;
    int m_d = 128;
    std::vector<double> gamma_min_db{0.0};
    double p_max_dbm = 30.0;

    PathLossModel direct_loss{-20.0, 1.0, 3.0};
    PathLossModel ris_loss{-10.0, 1.0, 2.0};
    std::vector<double> user_distance{30.0};     // BS to user, metres
    double bs_ris_distance = 10.0;
    std::vector<double> ris_user_distance{5.0};  // surface to user, metres
    int transmit_users = -1;                     // users [0, n) face the transmit side; -1 means ceil(N/2)

    int episode_len = 20;
    bool redraw_per_episode = true;

    int antennas() const { return p_y * p_z; }
    int state_dim() const;
    int action_dim() const;

    LinkBudget budget() const;
    FimGeometry fim_geometry() const;  // offsets zero
    FimGeometry ris_grid() const;
    LinkPowers link_powers() const;
    std::vector<Sector> sectors() const;

    /// Throws DomainError naming the offending field.
    void validate() const;
};

/// Offsets of each block inside an ActionVec.
struct ActionLayout {
    int morph;         // P entries
    int beam_mag;      // P*N entries, index n*P + p
    int beam_phase;    // P*N entries
    int theta_t;       // F
    int theta_r;       // F
    int amp_t;         // F
    int amp_r;         // F
    int size;

    explicit ActionLayout(const EnvConfig& cfg);
};

/// Maps an agent output in [-1, 1]^d onto a solution that satisfies the
/// power budget, morphing range and energy-split constraints.
SolutionPoint decode_action(std::span<const double> action, const EnvConfig& cfg);

/// Channel and rate blocks of the observation, in the documented layout.
StateVec encode_state(const ChannelSet& ch, const RateReport& report, const EnvConfig& cfg);

struct StepResult {
    StateVec state;
    double reward = 0.0;
    bool done = false;
    RateReport report;
};

/// Reward of one evaluated solution: +sum max(R, 0) when feasible, the
/// negation otherwise.
double reward_of(const RateReport& report);

class Env {
public:
    Env(EnvConfig cfg, PrngStream channel_stream);

    const EnvConfig& config() const { return cfg_; }
    int state_dim() const { return cfg_.state_dim(); }
    int action_dim() const { return cfg_.action_dim(); }

    /// Starts episode `episode`. With redraw_per_episode the channel comes
    /// from a sub-stream labelled by the episode index, otherwise every
    /// episode reuses the same realization.
    StateVec reset(std::uint64_t episode);

    StepResult step(std::span<const double> action);

    bool ready() const { return realization_.has_value(); }
    int steps_taken() const { return steps_; }
    const ChannelSet& channels() const;
    const RateReport& last_report() const;

private:
    void apply(std::span<const double> action);

    EnvConfig cfg_;
    PrngStream stream_;
    FimGeometry ris_grid_;
    std::optional<ChannelRealization> realization_;
    ChannelSet channels_;
    RateReport report_;
    int steps_ = 0;
};

}  // namespace fimstar
