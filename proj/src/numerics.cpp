#include "fimstar/numerics.hpp"

#include <cmath>
#include <numbers>

namespace fimstar {

namespace {

constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;

std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id) {
    return mix64(mix64(seed ^ 0xD1B54A32D192ED03ULL) + mix64(stream_id + kWeyl));
}

// Acklam's rational approximation of the standard normal quantile,
// relative error below 1.2e-9 before polishing.
double normal_quantile_seed(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x += kWeyl;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

PrngStream::PrngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(derive_key(seed, stream_id)) {}

PrngStream PrngStream::substream(std::uint64_t label) const {
    // Child ids live in a hashed space so they do not collide with the
    // small integer ids callers pick for top-level streams.
    return PrngStream(seed_, mix64(stream_id_ ^ mix64(label + 0x632BE59BD9B4E019ULL)));
}

PrngStream PrngStream::restore(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter) {
    PrngStream s(seed, stream_id);
    s.counter_ = counter;
    return s;
}

std::uint64_t PrngStream::next_u64() {
    // Two mixing rounds over key + counter * weyl.
    const std::uint64_t x = key_ + (++counter_) * kWeyl;
    return mix64(mix64(x) ^ key_);
}

double PrngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PrngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::complex<double> PrngStream::gaussian_pair() {
    // u1 in (0, 1] keeps the log finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

double PrngStream::gaussian() {
    return gaussian_pair().real();
}

std::complex<double> sample_cgauss(PrngStream& rng, double variance) {
    if (!(variance >= 0.0)) {
        throw DomainError("sample_cgauss: variance must be non-negative");
    }
    if (variance == 0.0) {
        return {0.0, 0.0};
    }
    return rng.gaussian_pair() * std::sqrt(variance / 2.0);
}

double gaussian_q(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double gaussian_q_inv(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError("gaussian_q_inv: eps must lie in (0, 1)");
    }
    if (eps == 0.5) {
        return 0.0;
    }
    // Q^-1(eps) = -Phi^-1(eps)
    double x = -normal_quantile_seed(eps);
    const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    for (int iter = 0; iter < 8; ++iter) {
        const double residual = gaussian_q(x) - eps;
        const double density = inv_sqrt_2pi * std::exp(-0.5 * x * x);
        if (density == 0.0) {
            break;
        }
        // Halley step on Q(x) - eps; Q' = -density, Q'' = x * density.
        const double newton = residual / density;
        const double step = newton / (1.0 - 0.5 * x * newton);
        x += step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) {
            break;
        }
    }
    return x;
}

}  // namespace fimstar
