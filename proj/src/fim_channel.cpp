#include "fimstar/fim_channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fimstar {

FimGeometry FimGeometry::planar(int p_y, int p_z, double spacing, double lambda, double x_max) {
    FimGeometry g;
    g.p_y = p_y;
    g.p_z = p_z;
    g.r_y = spacing;
    g.r_z = spacing;
    g.x.assign(static_cast<std::size_t>(std::max(p_y * p_z, 0)), 0.0);
    g.x_max = x_max;
    g.lambda = lambda;
    return g;
}

void FimGeometry::validate() const {
    if (p_y < 1 || p_z < 1) {
        throw DomainError("FimGeometry: grid counts must be positive");
    }
    if (!(lambda > 0.0) || r_y < 0.0 || r_z < 0.0 || x_max < 0.0) {
        throw DomainError("FimGeometry: wavelength must be positive, spacings and x_max non-negative");
    }
    if (static_cast<int>(x.size()) != count()) {
        throw DomainError("FimGeometry: offset vector length " + std::to_string(x.size()) +
                          " does not match element count " + std::to_string(count()));
    }
    for (double v : x) {
        if (!(v >= 0.0 && v <= x_max)) {
            throw DomainError("FimGeometry: morphing offset outside [0, x_max]");
        }
    }
}

std::vector<ElementPosition> element_positions(const FimGeometry& geom) {
    std::vector<ElementPosition> out;
    out.reserve(static_cast<std::size_t>(geom.count()));
    for (int p = 0; p < geom.count(); ++p) {
        out.push_back({geom.x[static_cast<std::size_t>(p)], geom.r_y * (p % geom.p_y),
                       geom.r_z * (p / geom.p_y)});
    }
    return out;
}

Eigen::VectorXcd steering(const FimGeometry& geom, double azimuth, double elevation) {
    const double wavenumber = 2.0 * std::numbers::pi / geom.lambda;
    const double sin_el = std::sin(elevation);
    const double ux = sin_el * std::cos(azimuth);
    const double uy = sin_el * std::sin(azimuth);
    const double uz = std::cos(elevation);
    Eigen::VectorXcd q(geom.count());
    for (int p = 0; p < geom.count(); ++p) {
        const double y = geom.r_y * (p % geom.p_y);
        const double z = geom.r_z * (p / geom.p_y);
        const double phase = wavenumber * (geom.x[static_cast<std::size_t>(p)] * ux + y * uy + z * uz);
        q[p] = std::polar(1.0, phase);
    }
    return q;
}

PathSet draw_paths(PrngStream& rng, int paths, double total_power) {
    if (paths < 1) {
        throw DomainError("draw_paths: path count must be at least 1");
    }
    if (!(total_power > 0.0)) {
        throw DomainError("draw_paths: total power must be positive");
    }
    PathSet set;
    set.total_power = total_power;
    const auto d = static_cast<std::size_t>(paths);
    set.variances.assign(d, total_power / paths);
    // Last share absorbs rounding so the shares sum to total_power exactly.
    double assigned = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
        assigned += set.variances[i];
    }
    set.variances.back() = total_power - assigned;

    set.gains.reserve(d);
    set.elevations.reserve(d);
    set.azimuths.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        set.gains.push_back(sample_cgauss(rng, set.variances[i]));
        set.elevations.push_back(rng.uniform(0.0, std::numbers::pi));
        set.azimuths.push_back(rng.uniform(0.0, std::numbers::pi));
    }
    return set;
}

Eigen::VectorXcd direct_channel(const FimGeometry& geom, const PathSet& paths) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(geom.count());
    for (int d = 0; d < paths.count(); ++d) {
        const auto i = static_cast<std::size_t>(d);
        out += paths.gains[i] * steering(geom, paths.azimuths[i], paths.elevations[i]);
    }
    return out;
}

Eigen::MatrixXcd bs_ris_channel(const FimGeometry& geom, std::span<const PathSet> per_column_paths) {
    if (per_column_paths.empty()) {
        throw DomainError("bs_ris_channel: at least one surface element required");
    }
    Eigen::MatrixXcd h(geom.count(), static_cast<Eigen::Index>(per_column_paths.size()));
    for (std::size_t f = 0; f < per_column_paths.size(); ++f) {
        h.col(static_cast<Eigen::Index>(f)) = direct_channel(geom, per_column_paths[f]);
    }
    return h;
}

Eigen::VectorXcd ris_user_channel(const FimGeometry& ris_grid, const PathSet& paths) {
    for (double v : ris_grid.x) {
        if (v != 0.0) {
            throw DomainError("ris_user_channel: surface grid offsets must be zero");
        }
    }
    return direct_channel(ris_grid, paths);
}

double PathLossModel::gain(double distance) const {
    if (!(distance > 0.0) || !(ref_distance > 0.0)) {
        throw DomainError("PathLossModel: distances must be positive");
    }
    return db_to_linear(ref_gain_db) * std::pow(distance / ref_distance, -exponent);
}

ChannelSet ChannelRealization::evaluate(const FimGeometry& fim, const FimGeometry& ris_grid) const {
    const auto users = static_cast<Eigen::Index>(direct.size());
    ChannelSet set;
    set.t.resize(fim.count(), users);
    set.k.resize(ris_grid.count(), users);
    for (Eigen::Index n = 0; n < users; ++n) {
        const auto i = static_cast<std::size_t>(n);
        set.t.col(n) = direct_channel(fim, direct[i]);
        set.k.col(n) = ris_user_channel(ris_grid, ris_user[i]);
    }
    set.H = bs_ris_channel(fim, bs_ris);
    set.sector = sector;
    return set;
}

ChannelRealization draw_realization(const PrngStream& rng, int elements, int paths,
                                    const LinkPowers& powers, std::span<const Sector> sectors) {
    constexpr std::uint64_t kDirect = 1ULL << 32;
    constexpr std::uint64_t kBsRis = 2ULL << 32;
    constexpr std::uint64_t kRisUser = 3ULL << 32;

    const std::size_t users = sectors.size();
    if (powers.direct.size() != users || powers.ris_user.size() != users) {
        throw DomainError("draw_realization: per-user link powers do not match user count");
    }
    ChannelRealization r;
    r.sector.assign(sectors.begin(), sectors.end());
    for (std::size_t n = 0; n < users; ++n) {
        PrngStream s = rng.substream(kDirect | n);
        r.direct.push_back(draw_paths(s, paths, powers.direct[n]));
        PrngStream u = rng.substream(kRisUser | n);
        r.ris_user.push_back(draw_paths(u, paths, powers.ris_user[n]));
    }
    for (int f = 0; f < elements; ++f) {
        PrngStream s = rng.substream(kBsRis | static_cast<std::uint64_t>(f));
        r.bs_ris.push_back(draw_paths(s, paths, powers.bs_ris));
    }
    return r;
}

std::pair<int, int> grid_shape(int elements) {
    if (elements < 1) {
        throw DomainError("grid_shape: element count must be positive");
    }
    int rows = static_cast<int>(std::sqrt(static_cast<double>(elements)));
    while (rows > 1 && elements % rows != 0) {
        --rows;
    }
    return {rows, elements / rows};
}

}  // namespace fimstar
