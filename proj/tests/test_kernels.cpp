#include <cmath>
#include <vector>

#include "doctest.h"
#include "fimstar/kernels.hpp"
#include "fimstar/numerics.hpp"

using namespace fimstar;
using namespace fimstar::kernels;

namespace {

std::vector<double> random_vec(PrngStream& rng, std::size_t n, double zero_fraction = 0.0) {
    std::vector<double> v(n);
    for (double& x : v) {
        x = rng.uniform() < zero_fraction ? 0.0 : rng.uniform(-1.0, 1.0);
    }
    return v;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
    }
    return worst;
}

}  // namespace

TEST_CASE("scalar kernels against naive loops") {
    PrngStream rng(1, 1);
    const KernelTable& s = scalar_table();
    const std::size_t m = 5, n = 7, k = 9;
    const auto a = random_vec(rng, m * k);
    const auto b = random_vec(rng, n * k);
    const auto bias = random_vec(rng, n);
    std::vector<double> c(m * n);
    s.gemm_nt(m, n, k, a.data(), b.data(), bias.data(), c.data());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double ref = bias[j];
            for (std::size_t q = 0; q < k; ++q) {
                ref += a[i * k + q] * b[j * k + q];
            }
            CHECK(c[i * n + j] == doctest::Approx(ref).epsilon(1e-14));
        }
    }

    // Transposed A through the strides.
    const auto at = random_vec(rng, k * m);
    const auto bk = random_vec(rng, k * n);
    std::vector<double> acc(m * n, 1.0);
    s.gemm_acc(m, n, k, at.data(), 1, m, bk.data(), acc.data());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double ref = 1.0;
            for (std::size_t q = 0; q < k; ++q) {
                ref += at[q * m + i] * bk[q * n + j];
            }
            CHECK(acc[i * n + j] == doctest::Approx(ref).epsilon(1e-14));
        }
    }
}

TEST_CASE("avx2 kernels match scalar kernels") {
    const KernelTable* v = avx2_table();
    if (v == nullptr) {
        MESSAGE("AVX2 unavailable on this machine; equivalence not exercised");
        return;
    }
    const KernelTable& s = scalar_table();
    PrngStream rng(2, 2);
    for (std::size_t trial = 0; trial < 40; ++trial) {
        const std::size_t m = 1 + rng.next_u64() % 9;
        const std::size_t n = 1 + rng.next_u64() % 37;
        const std::size_t k = 1 + rng.next_u64() % 53;
        const auto a = random_vec(rng, m * k, 0.3);
        const auto b = random_vec(rng, n * k);
        const auto bias = random_vec(rng, n);
        std::vector<double> c1(m * n), c2(m * n);
        s.gemm_nt(m, n, k, a.data(), b.data(), trial % 2 ? bias.data() : nullptr, c1.data());
        v->gemm_nt(m, n, k, a.data(), b.data(), trial % 2 ? bias.data() : nullptr, c2.data());
        CHECK(max_rel_diff(c1, c2) < 1e-13);

        const auto bk = random_vec(rng, k * n);
        std::vector<double> d1(m * n, 0.5), d2(m * n, 0.5);
        s.gemm_acc(m, n, k, a.data(), k, 1, bk.data(), d1.data());
        v->gemm_acc(m, n, k, a.data(), k, 1, bk.data(), d2.data());
        CHECK(max_rel_diff(d1, d2) < 1e-13);

        const auto x = random_vec(rng, n);
        auto y1 = random_vec(rng, n);
        auto y2 = y1;
        s.axpy(n, 0.7, x.data(), y1.data());
        v->axpy(n, 0.7, x.data(), y2.data());
        CHECK(max_rel_diff(y1, y2) < 1e-15);
        CHECK(s.dot(n, x.data(), y1.data()) == doctest::Approx(v->dot(n, x.data(), y1.data())).epsilon(1e-13));
    }
}

TEST_CASE("kernel selection") {
    const Isa before = active().isa;
    CHECK(select(Isa::scalar));
    CHECK(active().isa == Isa::scalar);
    if (avx2_table() != nullptr) {
        CHECK(select(Isa::avx2));
        CHECK(active().isa == Isa::avx2);
    } else {
        CHECK_FALSE(select(Isa::avx2));
    }
    select(before);
    CHECK(isa_name(Isa::scalar) == "scalar");
}
