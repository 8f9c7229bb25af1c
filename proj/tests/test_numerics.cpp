#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "fimstar/numerics.hpp"

using namespace fimstar;

TEST_CASE("gaussian_q reference values") {
    CHECK(gaussian_q(2.0) == doctest::Approx(0.022750131948179207).epsilon(1e-14));
    CHECK(gaussian_q(1.3) == doctest::Approx(0.09680048458561033).epsilon(1e-14));
    CHECK(gaussian_q(0.0) == 0.5);
    CHECK(gaussian_q(-2.0) == doctest::Approx(1.0 - 0.022750131948179207).epsilon(1e-14));
}

TEST_CASE("gaussian_q_inv reference values") {
    CHECK(gaussian_q_inv(0.5) == 0.0);
    CHECK(gaussian_q_inv(0.0227501) == doctest::Approx(2.0000005917).epsilon(1e-9));
    CHECK(gaussian_q_inv(1e-5) == doctest::Approx(4.264890793922825).epsilon(1e-12));
    CHECK(gaussian_q_inv(1.0 - 1e-5) == doctest::Approx(-4.264890793922825).epsilon(1e-10));
}

TEST_CASE("gaussian_q_inv rejects values outside (0, 1)") {
    CHECK_THROWS_AS(gaussian_q_inv(0.0), DomainError);
    CHECK_THROWS_AS(gaussian_q_inv(1.0), DomainError);
    CHECK_THROWS_AS(gaussian_q_inv(-0.1), DomainError);
    CHECK_THROWS_AS(gaussian_q_inv(std::nan("")), DomainError);
}

TEST_CASE("gaussian_q_inv round trip over a log grid") {
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double eps = std::pow(10.0, -12.0 + 11.0 * i / 200.0) * 0.5;
        worst = std::max(worst, std::abs(gaussian_q(gaussian_q_inv(eps)) - eps) / eps);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("stream is a pure function of seed, id and counter") {
    PrngStream a(42, 7);
    PrngStream b(42, 7);
    for (int i = 0; i < 100; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }
    PrngStream c(42, 8);
    PrngStream d(43, 7);
    PrngStream e(42, 7);
    CHECK(c.next_u64() != e.next_u64());
    CHECK(d.next_u64() != PrngStream(42, 7).next_u64());

    PrngStream mid(42, 7);
    for (int i = 0; i < 37; ++i) {
        mid.next_u64();
    }
    PrngStream resumed = PrngStream::restore(42, 7, mid.counter());
    CHECK(resumed == mid);
    CHECK(resumed.next_u64() == mid.next_u64());
}

TEST_CASE("substreams do not depend on parent consumption") {
    PrngStream parent(5, 1);
    const std::uint64_t first = parent.substream(3).next_u64();
    for (int i = 0; i < 10; ++i) {
        parent.next_u64();
    }
    CHECK(parent.substream(3).next_u64() == first);
    CHECK(parent.substream(4).next_u64() != first);

    std::set<std::uint64_t> seen;
    for (std::uint64_t label = 0; label < 1000; ++label) {
        seen.insert(parent.substream(label).next_u64());
    }
    CHECK(seen.size() == 1000);
}

TEST_CASE("uniform and gaussian moments") {
    PrngStream rng(11, 2);
    const int n = 200000;
    double su = 0.0, sg = 0.0, sg2 = 0.0;
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        su += u;
        const double g = rng.gaussian();
        sg += g;
        sg2 += g * g;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(sg / n) < 0.01);
    CHECK(sg2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("complex gaussian variance") {
    PrngStream rng(3, 3);
    const int n = 100000;
    double power = 0.0;
    std::complex<double> mean = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto z = sample_cgauss(rng, 2.5);
        power += std::norm(z);
        mean += z;
    }
    CHECK(power / n == doctest::Approx(2.5).epsilon(0.02));
    CHECK(std::abs(mean / static_cast<double>(n)) < 0.02);
    CHECK(sample_cgauss(rng, 0.0) == std::complex<double>(0.0, 0.0));
    CHECK_THROWS_AS(sample_cgauss(rng, -1.0), DomainError);
}

TEST_CASE("unit conversions") {
    CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(db_to_linear(0.0) == 1.0);
}
