#include "fimstar/fbl_link.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fimstar {

namespace {

// Like build_matrices, but never throws: an out-of-range split yields
// section powers that fail the energy-split check instead.
StarMatrices lenient_matrices(const StarConfig& cfg) {
    const auto f = static_cast<Eigen::Index>(cfg.beta.size());
    StarMatrices m{Eigen::VectorXcd(f), Eigen::VectorXcd(f)};
    for (Eigen::Index i = 0; i < f; ++i) {
        const auto u = static_cast<std::size_t>(i);
        m.omega_t[i] = std::polar(std::sqrt(std::max(cfg.beta[u], 0.0)), cfg.theta_t[u]);
        m.omega_r[i] = std::polar(std::sqrt(std::max(1.0 - cfg.beta[u], 0.0)), cfg.theta_r[u]);
    }
    return m;
}

}  // namespace

void LinkBudget::validate(int users) const {
    const auto n = static_cast<std::size_t>(users);
    if (sigma2.size() != n || eps.size() != n || gamma_min.size() != n) {
        throw DomainError("LinkBudget: per-user arrays must have " + std::to_string(users) + " entries");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sigma2[i] > 0.0)) {
            throw DomainError("LinkBudget: noise power must be positive");
        }
        if (!(eps[i] > 0.0 && eps[i] < 1.0)) {
            throw DomainError("LinkBudget: error probability must lie in (0, 1)");
        }
        if (!(gamma_min[i] >= 0.0)) {
            throw DomainError("LinkBudget: SINR floor must be non-negative");
        }
    }
    if (m_d < 1) {
        throw DomainError("LinkBudget: blocklength must be at least 1");
    }
    if (!(p_max > 0.0)) {
        throw DomainError("LinkBudget: power budget must be positive");
    }
}

std::string_view constraint_name(Constraint c) {
    switch (c) {
        case Constraint::sinr_floor:
            return "sinr_floor";
        case Constraint::power_budget:
            return "power_budget";
        case Constraint::morph_range:
            return "morph_range";
        case Constraint::energy_split:
            return "energy_split";
    }
    return "unknown";
}

double RateReport::clamped_sum_rate() const {
    double total = 0.0;
    for (double r : rate) {
        total += std::max(r, 0.0);
    }
    return total;
}

Eigen::VectorXcd effective_channel(const ChannelSet& ch, const StarMatrices& star, int user) {
    if (user < 0 || user >= ch.users()) {
        throw DomainError("effective_channel: user index out of range");
    }
    const auto& omega = ch.sector[static_cast<std::size_t>(user)] == Sector::transmit ? star.omega_t
                                                                                       : star.omega_r;
    return ch.H * omega.conjugate().cwiseProduct(ch.k.col(user)) + ch.t.col(user);
}

std::vector<double> sinr(const ChannelSet& ch, const StarMatrices& star, const Beamformer& beam,
                         const LinkBudget& budget) {
    const int users = ch.users();
    for (int n = 0; n < users; ++n) {
        if (!(budget.sigma2[static_cast<std::size_t>(n)] > 0.0)) {
            throw DomainError("sinr: noise power must be positive");
        }
    }
    Eigen::MatrixXcd v(ch.antennas(), users);
    for (int n = 0; n < users; ++n) {
        v.col(n) = effective_channel(ch, star, n);
    }
    // gains(n, m) = v_n^H w_m
    const Eigen::MatrixXcd gains = v.adjoint() * beam.w;
    std::vector<double> out(static_cast<std::size_t>(users));
    for (int n = 0; n < users; ++n) {
        double interference = 0.0;
        for (int m = 0; m < users; ++m) {
            if (m != n) {
                interference += std::norm(gains(n, m));
            }
        }
        out[static_cast<std::size_t>(n)] =
            std::norm(gains(n, n)) / (interference + budget.sigma2[static_cast<std::size_t>(n)]);
    }
    return out;
}

double dispersion(double gamma) {
    if (!(gamma >= 0.0)) {
        throw DomainError("dispersion: SINR must be non-negative");
    }
    constexpr double a = std::numbers::log2e;
    const double inv = 1.0 / (1.0 + gamma);
    return a * a * (1.0 - inv * inv);
}

double fbl_rate(double gamma, double eps, int m_d) {
    if (m_d < 1) {
        throw DomainError("fbl_rate: blocklength must be at least 1");
    }
    const double penalty = gaussian_q_inv(eps) * std::sqrt(dispersion(gamma) / m_d);
    return std::log2(1.0 + gamma) - penalty;
}

RateReport evaluate(const SolutionPoint& solution, const ChannelSet& channels, const LinkBudget& budget,
                    double x_max, FeasibilityTolerance tol) {
    const StarMatrices star = lenient_matrices(solution.star);
    RateReport report;
    report.gamma = sinr(channels, star, solution.beam, budget);
    report.rate.reserve(report.gamma.size());
    for (std::size_t n = 0; n < report.gamma.size(); ++n) {
        report.rate.push_back(fbl_rate(report.gamma[n], budget.eps[n], budget.m_d));
        report.sum_rate += report.rate.back();
    }

    for (std::size_t n = 0; n < report.gamma.size(); ++n) {
        if (!(report.gamma[n] >= budget.gamma_min[n])) {
            report.violations.push_back({Constraint::sinr_floor, static_cast<int>(n)});
        }
    }
    if (!(solution.beam.total_power() <= budget.p_max * (1.0 + tol.power_rel))) {
        report.violations.push_back({Constraint::power_budget, -1});
    }
    for (std::size_t p = 0; p < solution.x.size(); ++p) {
        if (!(solution.x[p] >= 0.0 && solution.x[p] <= x_max)) {
            report.violations.push_back({Constraint::morph_range, static_cast<int>(p)});
        }
    }
    for (Eigen::Index f = 0; f < star.omega_t.size(); ++f) {
        const double split = std::norm(star.omega_t[f]) + std::norm(star.omega_r[f]);
        if (!(std::abs(split - 1.0) <= tol.energy_split)) {
            report.violations.push_back({Constraint::energy_split, static_cast<int>(f)});
        }
    }
    report.feasible = report.violations.empty();
    return report;
}

}  // namespace fimstar
