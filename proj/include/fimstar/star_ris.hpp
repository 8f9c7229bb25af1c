#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace fimstar {

/// Per-element configuration of the simultaneously transmitting and
/// reflecting surface (cell-wise single-connected form).
///
/// Element f passes a fraction beta[f] of the incident energy to the
/// transmit side and 1 - beta[f] to the reflect side, so
/// |Omega_t^f|^2 + |Omega_r^f|^2 = 1 holds for any beta in [0, 1].
struct StarConfig {
    std::vector<double> theta_t;  // [0, 2 pi)
    std::vector<double> theta_r;  // [0, 2 pi)
    std::vector<double> beta;     // [0, 1]

    int elements() const { return static_cast<int>(beta.size()); }
};

/// Diagonal section matrices; Omega_t^H Omega_t + Omega_r^H Omega_r = I.
struct StarMatrices {
    Eigen::VectorXcd omega_t;  // diagonal of Omega_t
    Eigen::VectorXcd omega_r;  // diagonal of Omega_r

    Eigen::MatrixXcd transmit() const { return omega_t.asDiagonal(); }
    Eigen::MatrixXcd reflect() const { return omega_r.asDiagonal(); }
};

StarMatrices build_matrices(const StarConfig& cfg);

/// Maps unconstrained amplitudes and phases onto the energy-split set.
/// beta[f] = t^2 / (t^2 + r^2) with t = |raw_t[f]|, r = |raw_r[f]|;
/// both zero gives beta = 0.5. Phases are wrapped to [0, 2 pi).
StarConfig project_feasible(std::span<const double> raw_t, std::span<const double> raw_r,
                            std::span<const double> raw_theta_t, std::span<const double> raw_theta_r);

/// Wraps an angle to [0, 2 pi).
double wrap_phase(double angle);

/// max_f | |omega_t^f|^2 + |omega_r^f|^2 - 1 |
double energy_split_error(const StarMatrices& m);

}  // namespace fimstar
