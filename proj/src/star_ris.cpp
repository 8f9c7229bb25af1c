#include "fimstar/star_ris.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fimstar/numerics.hpp"

namespace fimstar {

double wrap_phase(double angle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(angle, two_pi);
    if (w < 0.0) {
        w += two_pi;
    }
    // fmod of a tiny negative angle can round up to exactly 2 pi.
    return w >= two_pi ? 0.0 : w;
}

StarMatrices build_matrices(const StarConfig& cfg) {
    const auto f = static_cast<Eigen::Index>(cfg.beta.size());
    if (cfg.theta_t.size() != cfg.beta.size() || cfg.theta_r.size() != cfg.beta.size()) {
        throw DomainError("build_matrices: phase and split arrays differ in length");
    }
    StarMatrices m{Eigen::VectorXcd(f), Eigen::VectorXcd(f)};
    for (Eigen::Index i = 0; i < f; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double beta = cfg.beta[u];
        if (!(beta >= 0.0 && beta <= 1.0)) {
            throw DomainError("build_matrices: beta outside [0, 1]");
        }
        m.omega_t[i] = std::polar(std::sqrt(beta), cfg.theta_t[u]);
        m.omega_r[i] = std::polar(std::sqrt(1.0 - beta), cfg.theta_r[u]);
    }
    return m;
}

StarConfig project_feasible(std::span<const double> raw_t, std::span<const double> raw_r,
                            std::span<const double> raw_theta_t, std::span<const double> raw_theta_r) {
    const std::size_t f = raw_t.size();
    if (raw_r.size() != f || raw_theta_t.size() != f || raw_theta_r.size() != f) {
        throw DomainError("project_feasible: input arrays differ in length");
    }
    StarConfig cfg;
    cfg.beta.resize(f);
    cfg.theta_t.resize(f);
    cfg.theta_r.resize(f);
    for (std::size_t i = 0; i < f; ++i) {
        const double a_t = std::abs(raw_t[i]);
        const double a_r = std::abs(raw_r[i]);
        const double scale = std::max(a_t, a_r);
        if (scale > 0.0) {
            const double t = a_t / scale;
            const double r = a_r / scale;
            cfg.beta[i] = t * t / (t * t + r * r);
        } else {
            cfg.beta[i] = 0.5;
        }
        cfg.theta_t[i] = wrap_phase(raw_theta_t[i]);
        cfg.theta_r[i] = wrap_phase(raw_theta_r[i]);
    }
    return cfg;
}

double energy_split_error(const StarMatrices& m) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m.omega_t.size(); ++i) {
        worst = std::max(worst, std::abs(std::norm(m.omega_t[i]) + std::norm(m.omega_r[i]) - 1.0));
    }
    return worst;
}

}  // namespace fimstar
