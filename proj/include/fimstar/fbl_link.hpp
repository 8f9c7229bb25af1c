#pragma once

#include <Eigen/Dense>
#include <string_view>
#include <vector>

#include "fimstar/fim_channel.hpp"
#include "fimstar/star_ris.hpp"

namespace fimstar {

/// Transmit beamformers, column n serves user n.
struct Beamformer {
    Eigen::MatrixXcd w;  // P x N

    double total_power() const { return w.squaredNorm(); }
};

struct LinkBudget {
    std::vector<double> sigma2;     // noise power per user, W
    std::vector<double> eps;        // decoding error probability per user
    int m_d = 128;                  // blocklength, channel uses
    std::vector<double> gamma_min;  // SINR floor per user, linear
    double p_max = 1.0;             // total transmit power, W

    /// Throws DomainError when sizes or ranges are wrong.
    void validate(int users) const;
};

/// Identifiers of the constraints checked by evaluate().
enum class Constraint { sinr_floor, power_budget, morph_range, energy_split };

std::string_view constraint_name(Constraint c);

struct Violation {
    Constraint constraint;
    int index;  // user, element or -1 for the global power budget

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct RateReport {
    std::vector<double> gamma;  // per-user SINR, linear
    std::vector<double> rate;   // raw finite-blocklength rate, bits per channel use
    double sum_rate = 0.0;      // sum of raw rates
    bool feasible = true;
    std::vector<Violation> violations;

    /// Sum of per-user rates with negative values replaced by zero.
    double clamped_sum_rate() const;
};

/// One candidate configuration: morphing offsets, beamformers, surface.
struct SolutionPoint {
    std::vector<double> x;
    Beamformer beam;
    StarConfig star;
};

/// v_n = H Omega_s^H k_n + t_n, the conjugate of the composite row
/// k_n^H Omega_s H^H + t_n^H seen by user n.
Eigen::VectorXcd effective_channel(const ChannelSet& ch, const StarMatrices& star, int user);

std::vector<double> sinr(const ChannelSet& ch, const StarMatrices& star, const Beamformer& beam,
                         const LinkBudget& budget);

/// (log2 e)^2 (1 - (1 + gamma)^-2)
double dispersion(double gamma);

/// log2(1 + gamma) - Q^-1(eps) sqrt(V(gamma) / m_d); may be negative.
double fbl_rate(double gamma, double eps, int m_d);

/// Tolerances used by evaluate() when checking the hard constraints.
struct FeasibilityTolerance {
    double power_rel = 1e-12;
    double energy_split = 1e-12;
};

/// `channels` must be the realization evaluated at solution.x.
RateReport evaluate(const SolutionPoint& solution, const ChannelSet& channels, const LinkBudget& budget,
                    double x_max, FeasibilityTolerance tol = {});

}  // namespace fimstar
