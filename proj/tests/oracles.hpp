#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance suite. They use plain loops over std::complex instead of the
// library's matrix path.

#include <complex>
#include <functional>
#include <vector>

#include "fimstar/fbl_link.hpp"
#include "fimstar/numerics.hpp"

namespace oracle {

using cd = std::complex<double>;

/// Gamma_n from the received-signal form y_n = (k_n^H Omega_s H^H + t_n^H) W.
inline std::vector<double> sinr(const fimstar::ChannelSet& ch, const fimstar::StarConfig& star,
                                const Eigen::MatrixXcd& w, const std::vector<double>& sigma2) {
    const int p_count = ch.antennas();
    const int f_count = ch.elements();
    const int users = ch.users();
    std::vector<double> out(static_cast<std::size_t>(users));
    for (int n = 0; n < users; ++n) {
        const bool transmit = ch.sector[static_cast<std::size_t>(n)] == fimstar::Sector::transmit;
        std::vector<cd> row(static_cast<std::size_t>(p_count));
        for (int p = 0; p < p_count; ++p) {
            cd acc = std::conj(ch.t(p, n));
            for (int f = 0; f < f_count; ++f) {
                const double amp = std::sqrt(transmit ? star.beta[f] : 1.0 - star.beta[f]);
                const double theta = transmit ? star.theta_t[f] : star.theta_r[f];
                acc += std::conj(ch.k(f, n)) * std::polar(amp, theta) * std::conj(ch.H(p, f));
            }
            row[static_cast<std::size_t>(p)] = acc;
        }
        double signal = 0.0, interference = 0.0;
        for (int m = 0; m < users; ++m) {
            cd y = 0.0;
            for (int p = 0; p < p_count; ++p) {
                y += row[static_cast<std::size_t>(p)] * w(p, m);
            }
            (m == n ? signal : interference) += std::norm(y);
        }
        out[static_cast<std::size_t>(n)] = signal / (interference + sigma2[static_cast<std::size_t>(n)]);
    }
    return out;
}

/// Central difference of f along `dir` at `x`.
inline double directional_fd(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                             const std::vector<double>& dir, double h) {
    std::vector<double> plus = x, minus = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        plus[i] += h * dir[i];
        minus[i] -= h * dir[i];
    }
    return (f(plus) - f(minus)) / (2.0 * h);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline std::vector<double> random_direction(fimstar::PrngStream& rng, std::size_t n) {
    std::vector<double> d(n);
    double norm = 0.0;
    for (double& v : d) {
        v = rng.gaussian();
        norm += v * v;
    }
    for (double& v : d) {
        v /= std::sqrt(norm);
    }
    return d;
}

}  // namespace oracle
