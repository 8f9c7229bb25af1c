#include "fimstar/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fimstar {

namespace {

std::vector<double> per_user(const std::vector<double>& values, int users, const char* field) {
    if (values.size() == 1) {
        return std::vector<double>(static_cast<std::size_t>(users), values.front());
    }
    if (static_cast<int>(values.size()) != users) {
        throw DomainError(std::string("EnvConfig: ") + field + " needs 1 or " + std::to_string(users) +
                          " values");
    }
    return values;
}

void require(bool ok, const char* message) {
    if (!ok) {
        throw DomainError(std::string("EnvConfig: ") + message);
    }
}

constexpr double kGammaDbFloor = -40.0;
constexpr double kGammaDbCeil = 40.0;

}  // namespace

int EnvConfig::state_dim() const {
    const int p = antennas();
    return 2 * p * users + 2 * p * elements + 2 * elements * users + 2 * users;
}

int EnvConfig::action_dim() const {
    const int p = antennas();
    return p + 2 * p * users + 4 * elements;
}

LinkBudget EnvConfig::budget() const {
    LinkBudget b;
    const double noise_w = dbm_to_watts(noise_dbm_per_hz + 10.0 * std::log10(bandwidth_hz));
    b.sigma2.assign(static_cast<std::size_t>(users), noise_w);
    b.eps.assign(static_cast<std::size_t>(users), eps);
    b.m_d = m_d;
    for (double db : per_user(gamma_min_db, users, "gamma_min_db")) {
        b.gamma_min.push_back(db_to_linear(db));
    }
    b.p_max = dbm_to_watts(p_max_dbm);
    return b;
}

FimGeometry EnvConfig::fim_geometry() const {
    return FimGeometry::planar(p_y, p_z, spacing, lambda, x_max);
}

FimGeometry EnvConfig::ris_grid() const {
    const auto [rows, cols] = grid_shape(elements);
    return FimGeometry::planar(cols, rows, spacing, lambda, 0.0);
}

LinkPowers EnvConfig::link_powers() const {
    LinkPowers powers;
    for (double d : per_user(user_distance, users, "user_distance")) {
        powers.direct.push_back(direct_loss.gain(d));
    }
    powers.bs_ris = ris_loss.gain(bs_ris_distance);
    for (double d : per_user(ris_user_distance, users, "ris_user_distance")) {
        powers.ris_user.push_back(ris_loss.gain(d));
    }
    return powers;
}

std::vector<Sector> EnvConfig::sectors() const {
    const int transmit = transmit_users < 0 ? (users + 1) / 2 : transmit_users;
    std::vector<Sector> out(static_cast<std::size_t>(users), Sector::reflect);
    std::fill_n(out.begin(), std::min(transmit, users), Sector::transmit);
    return out;
}

void EnvConfig::validate() const {
    require(p_y >= 1 && p_z >= 1, "p_y and p_z must be positive");
    require(users >= 1, "users must be positive");
    require(antennas() >= users, "antenna count p_y * p_z must be at least the user count");
    require(elements >= 1, "elements must be positive");
    require(paths >= 1, "paths must be positive");
    require(lambda > 0.0 && spacing > 0.0, "lambda and spacing must be positive");
    require(x_max >= 0.0, "x_max must be non-negative");
    require(bandwidth_hz > 0.0, "bandwidth_hz must be positive");
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    require(m_d >= 1, "m_d must be at least 1");
    require(transmit_users <= users, "transmit_users exceeds users");
    require(episode_len >= 1, "episode_len must be at least 1");
    require(bs_ris_distance > 0.0, "bs_ris_distance must be positive");
    budget().validate(users);
    (void)link_powers();
}

ActionLayout::ActionLayout(const EnvConfig& cfg) {
    const int p = cfg.antennas();
    const int pn = p * cfg.users;
    const int f = cfg.elements;
    morph = 0;
    beam_mag = morph + p;
    beam_phase = beam_mag + pn;
    theta_t = beam_phase + pn;
    theta_r = theta_t + f;
    amp_t = theta_r + f;
    amp_r = amp_t + f;
    size = amp_r + f;
}

SolutionPoint decode_action(std::span<const double> action, const EnvConfig& cfg) {
    const ActionLayout layout(cfg);
    if (static_cast<int>(action.size()) != layout.size) {
        throw DomainError("decode_action: action has " + std::to_string(action.size()) +
                          " entries, expected " + std::to_string(layout.size));
    }
    const auto at = [&](int offset, int i) { return std::clamp(action[static_cast<std::size_t>(offset + i)], -1.0, 1.0); };
    const auto unit = [&](int offset, int i) { return 0.5 * (at(offset, i) + 1.0); };

    const int p = cfg.antennas();
    const int users = cfg.users;
    const int f = cfg.elements;
    SolutionPoint sol;

    sol.x.resize(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        sol.x[static_cast<std::size_t>(i)] = std::min(cfg.x_max * unit(layout.morph, i), cfg.x_max);
    }

    // Per-entry magnitude in [0, sqrt(2 p_max / (P N))], phase in [0, 2 pi].
    // Saturated magnitudes would spend twice the budget, so the projection
    // below is active on part of the action box.
    const double p_max = dbm_to_watts(cfg.p_max_dbm);
    const double mag_scale = std::sqrt(2.0 * p_max / (p * users));
    sol.beam.w.resize(p, users);
    for (int n = 0; n < users; ++n) {
        for (int i = 0; i < p; ++i) {
            const int idx = n * p + i;
            const double phase = std::numbers::pi * (at(layout.beam_phase, idx) + 1.0);
            sol.beam.w(i, n) = std::polar(mag_scale * unit(layout.beam_mag, idx), phase);
        }
    }
    const double power = sol.beam.total_power();
    if (power > p_max) {
        sol.beam.w *= std::sqrt(p_max / power);
    }

    std::vector<double> raw_t(static_cast<std::size_t>(f));
    std::vector<double> raw_r(raw_t.size());
    std::vector<double> phase_t(raw_t.size());
    std::vector<double> phase_r(raw_t.size());
    for (int i = 0; i < f; ++i) {
        const auto u = static_cast<std::size_t>(i);
        raw_t[u] = unit(layout.amp_t, i);
        raw_r[u] = unit(layout.amp_r, i);
        phase_t[u] = std::numbers::pi * (at(layout.theta_t, i) + 1.0);
        phase_r[u] = std::numbers::pi * (at(layout.theta_r, i) + 1.0);
    }
    sol.star = project_feasible(raw_t, raw_r, phase_t, phase_r);
    return sol;
}

StateVec encode_state(const ChannelSet& ch, const RateReport& report, const EnvConfig& cfg) {
    const LinkPowers powers = cfg.link_powers();
    StateVec s;
    s.reserve(static_cast<std::size_t>(cfg.state_dim()));
    const auto push_block = [&s](const Eigen::MatrixXcd& m, const auto& scale_of_column) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double inv = 1.0 / std::sqrt(scale_of_column(c));
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                s.push_back(m(r, c).real() * inv);
                s.push_back(m(r, c).imag() * inv);
            }
        }
    };
    push_block(ch.t, [&](Eigen::Index c) { return powers.direct[static_cast<std::size_t>(c)]; });
    push_block(ch.H, [&](Eigen::Index) { return powers.bs_ris; });
    push_block(ch.k, [&](Eigen::Index c) { return powers.ris_user[static_cast<std::size_t>(c)]; });
    for (double g : report.gamma) {
        const double db = g > 0.0 ? 10.0 * std::log10(g) : kGammaDbFloor;
        s.push_back(std::clamp(db, kGammaDbFloor, kGammaDbCeil));
    }
    for (double r : report.rate) {
        s.push_back(r);
    }
    return s;
}

double reward_of(const RateReport& report) {
    const double magnitude = report.clamped_sum_rate();
    return report.feasible ? magnitude : -magnitude;
}

Env::Env(EnvConfig cfg, PrngStream channel_stream)
    : cfg_(std::move(cfg)), stream_(channel_stream) {
    cfg_.validate();
    ris_grid_ = cfg_.ris_grid();
}

StateVec Env::reset(std::uint64_t episode) {
    const PrngStream episode_stream = stream_.substream(cfg_.redraw_per_episode ? episode : 0);
    const auto sectors = cfg_.sectors();
    realization_ = draw_realization(episode_stream, cfg_.elements, cfg_.paths, cfg_.link_powers(), sectors);
    steps_ = 0;
    const std::vector<double> neutral(static_cast<std::size_t>(cfg_.action_dim()), 0.0);
    apply(neutral);
    return encode_state(channels_, report_, cfg_);
}

void Env::apply(std::span<const double> action) {
    const SolutionPoint sol = decode_action(action, cfg_);
    FimGeometry fim = cfg_.fim_geometry();
    fim.x = sol.x;
    channels_ = realization_->evaluate(fim, ris_grid_);
    report_ = evaluate(sol, channels_, cfg_.budget(), cfg_.x_max);
}

StepResult Env::step(std::span<const double> action) {
    if (!realization_) {
        throw UsageError("Env::step called before reset");
    }
    if (steps_ >= cfg_.episode_len) {
        throw UsageError("Env::step called after the episode ended; reset first");
    }
    apply(action);
    ++steps_;
    StepResult out;
    out.state = encode_state(channels_, report_, cfg_);
    out.reward = reward_of(report_);
    out.done = steps_ >= cfg_.episode_len;
    out.report = report_;
    return out;
}

const ChannelSet& Env::channels() const {
    if (!realization_) {
        throw UsageError("Env::channels called before reset");
    }
    return channels_;
}

const RateReport& Env::last_report() const {
    if (!realization_) {
        throw UsageError("Env::last_report called before reset");
    }
    return report_;
}

}  // namespace fimstar
