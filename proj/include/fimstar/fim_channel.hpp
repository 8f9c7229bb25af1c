#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "fimstar/numerics.hpp"

namespace fimstar {

using cd = std::complex<double>;

/// Planar element grid of a flexible metasurface antenna.
///
/// Elements are indexed row-major over p_y columns: element p (0-based)
/// sits at y = r_y * (p mod p_y), z = r_z * floor(p / p_y), and is displaced
/// perpendicular to the plane by the morphing offset x[p] in [0, x_max].
struct FimGeometry {
    int p_y = 1;
    int p_z = 1;
    double r_y = 0.0;
    double r_z = 0.0;
    std::vector<double> x;  // morphing offsets, metres
    double x_max = 0.0;
    double lambda = 1.0;

    int count() const { return p_y * p_z; }

    /// Flat grid (all offsets zero) with equal spacing in both directions.
    static FimGeometry planar(int p_y, int p_z, double spacing, double lambda, double x_max = 0.0);

    /// Throws DomainError on bad counts, spacings or offsets out of [0, x_max].
    void validate() const;
};

struct ElementPosition {
    double x;
    double y;
    double z;
};

std::vector<ElementPosition> element_positions(const FimGeometry& geom);

/// Array response toward (azimuth, elevation); every entry has unit modulus.
Eigen::VectorXcd steering(const FimGeometry& geom, double azimuth, double elevation);

/// Random multipath description of one link.
struct PathSet {
    std::vector<cd> gains;
    std::vector<double> elevations;  // [0, pi)
    std::vector<double> azimuths;    // [0, pi)
    std::vector<double> variances;   // per-path average power, sums to total_power
    double total_power = 0.0;

    int count() const { return static_cast<int>(gains.size()); }
};

/// D paths, equal power split total_power / D, CN gains, uniform angles.
PathSet draw_paths(PrngStream& rng, int paths, double total_power);

/// sum_d gain_d * steering(azimuth_d, elevation_d)
Eigen::VectorXcd direct_channel(const FimGeometry& geom, const PathSet& paths);

/// Column f is the superposition for the f-th surface element.
Eigen::MatrixXcd bs_ris_channel(const FimGeometry& geom, std::span<const PathSet> per_column_paths);

/// Surface-to-user channel on the surface's own fixed grid (offsets must be zero).
Eigen::VectorXcd ris_user_channel(const FimGeometry& ris_grid, const PathSet& paths);

enum class Sector { transmit, reflect };

/// One evaluated channel realization for the current morphing state.
struct ChannelSet {
    Eigen::MatrixXcd t;  // P x N, column per user
    Eigen::MatrixXcd H;  // P x F
    Eigen::MatrixXcd k;  // F x N, column per user
    std::vector<Sector> sector;

    int antennas() const { return static_cast<int>(t.rows()); }
    int users() const { return static_cast<int>(t.cols()); }
    int elements() const { return static_cast<int>(H.cols()); }
};

/// Log-distance average power gain L = L0 * (d / d0)^(-exponent).
struct PathLossModel {
    double ref_gain_db = -20.0;
    double ref_distance = 1.0;
    double exponent = 2.0;

    double gain(double distance) const;
};

/// The random part of a channel: everything except the morphing state.
/// Re-evaluating with a different FIM offset vector reuses the same paths.
struct ChannelRealization {
    std::vector<PathSet> direct;    // per user
    std::vector<PathSet> bs_ris;    // per surface element
    std::vector<PathSet> ris_user;  // per user
    std::vector<Sector> sector;

    ChannelSet evaluate(const FimGeometry& fim, const FimGeometry& ris_grid) const;
};

struct LinkPowers {
    std::vector<double> direct;    // per user
    double bs_ris = 0.0;
    std::vector<double> ris_user;  // per user
};

/// Each link draws from its own labelled sub-stream of rng.
ChannelRealization draw_realization(const PrngStream& rng, int elements, int paths,
                                    const LinkPowers& powers, std::span<const Sector> sectors);

/// Near-square factorization rows x cols = elements with rows <= cols.
std::pair<int, int> grid_shape(int elements);

}  // namespace fimstar
