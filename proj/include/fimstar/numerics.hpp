#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace fimstar {

/// Counter-based random stream.
///
/// Every output is a pure function of (key, counter), where the key is
/// derived from (seed, stream_id). Sub-streams are derived by label, so
/// per-episode or per-link draws do not depend on the order in which
/// other streams were consumed. The generator and the Gaussian transform
/// are implemented here (not with <random> distributions) because the
/// standard distributions are not reproducible across library vendors.
class PrngStream {
public:
    PrngStream() = default;
    PrngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t counter() const { return counter_; }

    /// Independent child stream; does not advance this stream.
    PrngStream substream(std::uint64_t label) const;

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);
    /// Standard normal.
    double gaussian();
    /// Pair of independent standard normals from one Box-Muller draw.
    std::complex<double> gaussian_pair();

    /// Restores a stream mid-sequence (checkpoint support).
    static PrngStream restore(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter);

    friend bool operator==(const PrngStream&, const PrngStream&) = default;

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

/// Stable 64-bit mix used for key derivation (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
std::complex<double> sample_cgauss(PrngStream& rng, double variance);

/// Gaussian tail probability Q(x) = erfc(x / sqrt 2) / 2.
double gaussian_q(double x);

/// Inverse of gaussian_q on (0, 1).
double gaussian_q_inv(double eps);

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace fimstar
