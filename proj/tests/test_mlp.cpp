#include <cmath>

#include "doctest.h"
#include "fimstar/adam.hpp"
#include "fimstar/kernels.hpp"
#include "fimstar/mlp.hpp"
#include "fimstar/replay.hpp"
#include "oracles.hpp"

using namespace fimstar;

namespace {

Batch random_batch(PrngStream& rng, int rows, int cols) {
    Batch b(rows, cols);
    for (double& v : b.data) {
        v = rng.uniform(-1.0, 1.0);
    }
    return b;
}

// Half squared norm of the outputs.
LossEval half_square(const Batch& out) {
    LossEval e;
    e.d_output = out;
    for (double v : out.data) {
        e.value += 0.5 * v * v;
    }
    return e;
}

}  // namespace

TEST_CASE("forward pass of a hand-built network") {
    Mlp net = Mlp::zeros({2, 2, 1}, Activation::identity);
    auto p = net.params();
    // Layer 0: W = [[1, -1], [2, 0]], b = [0, -1]; layer 1: W = [[1, 3]], b = [0.5].
    const double w0[] = {1.0, -1.0, 2.0, 0.0};
    std::copy(std::begin(w0), std::end(w0), p.begin() + net.weight_offset(0));
    p[net.bias_offset(0) + 1] = -1.0;
    p[net.weight_offset(1)] = 1.0;
    p[net.weight_offset(1) + 1] = 3.0;
    p[net.bias_offset(1)] = 0.5;
    const auto y = mlp_forward(net, std::vector<double>{0.5, 2.0});
    // hidden = relu([-1.5, 0.0]) = [0, 0] -> 0.5
    CHECK(y[0] == doctest::Approx(0.5));
    const auto y2 = mlp_forward(net, std::vector<double>{2.0, 0.5});
    // hidden = relu([1.5, 3.0]) -> 1.5 + 9 + 0.5
    CHECK(y2[0] == doctest::Approx(11.0));
    CHECK(net.param_count() == 2 * 2 + 2 + 2 + 1);
}

TEST_CASE("initialization range and determinism") {
    PrngStream a(1, 2), b(1, 2);
    const Mlp n1({10, 8, 3}, Activation::tanh, a);
    const Mlp n2({10, 8, 3}, Activation::tanh, b);
    CHECK(std::equal(n1.params().begin(), n1.params().end(), n2.params().begin()));
    for (std::size_t i = 0; i < n1.bias_offset(0); ++i) {
        REQUIRE(std::abs(n1.params()[i]) <= 1.0 / std::sqrt(10.0));
    }
    PrngStream rng(3, 3);
    const Batch out = mlp_forward(n1, random_batch(rng, 5, 10));
    for (double v : out.data) {
        CHECK(std::abs(v) < 1.0);
    }
}

TEST_CASE("parameter gradient matches finite differences") {
    PrngStream rng(4, 4);
    for (Activation act : {Activation::identity, Activation::tanh}) {
        const Mlp net({6, 9, 7, 3}, act, rng);
        const Batch x = random_batch(rng, 5, 6);
        const std::vector<double> g = mlp_grad(net, x, half_square);
        const auto loss_at = [&](const std::vector<double>& p) {
            return half_square(mlp_forward(net, p, x)).value;
        };
        const std::vector<double> p0(net.params().begin(), net.params().end());
        for (int probe = 0; probe < 5; ++probe) {
            const auto d = oracle::random_direction(rng, p0.size());
            const double fd = oracle::directional_fd(loss_at, p0, d, 1e-6);
            CHECK(oracle::dot(g, d) == doctest::Approx(fd).epsilon(1e-6).scale(1e-12));
        }
    }
}

TEST_CASE("input gradient matches finite differences") {
    PrngStream rng(5, 5);
    const Mlp net({4, 8, 2}, Activation::tanh, rng);
    const Batch x = random_batch(rng, 3, 4);
    MlpTape tape;
    const Batch y = mlp_forward(net, x, &tape);
    Batch d_in;
    mlp_backward(net, net.params(), tape, half_square(y).d_output, {}, &d_in);
    const auto loss_at = [&](const std::vector<double>& in) {
        Batch b(3, 4);
        b.data = in;
        return half_square(mlp_forward(net, b)).value;
    };
    const auto d = oracle::random_direction(rng, x.data.size());
    CHECK(oracle::dot(d_in.data, d) == doctest::Approx(oracle::directional_fd(loss_at, x.data, d, 1e-6)).epsilon(1e-6).scale(1e-12));
}

TEST_CASE("parameter JVP matches finite differences of the outputs") {
    PrngStream rng(6, 6);
    const Mlp net({5, 7, 6, 2}, Activation::tanh, rng);
    const Batch x = random_batch(rng, 4, 5);
    MlpTape tape;
    mlp_forward(net, x, &tape);
    const auto d = oracle::random_direction(rng, net.param_count());
    const Batch jvp = mlp_jvp_params(net, net.params(), tape, d);
    std::vector<double> plus(net.params().begin(), net.params().end()), minus = plus;
    const double h = 1e-6;
    for (std::size_t i = 0; i < plus.size(); ++i) {
        plus[i] += h * d[i];
        minus[i] -= h * d[i];
    }
    const Batch yp = mlp_forward(net, plus, x);
    const Batch ym = mlp_forward(net, minus, x);
    for (std::size_t i = 0; i < jvp.data.size(); ++i) {
        CHECK(jvp.data[i] == doctest::Approx((yp.data[i] - ym.data[i]) / (2 * h)).epsilon(1e-6).scale(1e-12));
    }
}

TEST_CASE("input-tangent parameter gradient matches finite differences") {
    PrngStream rng(7, 7);
    const Mlp net({4, 8, 6, 1}, Activation::identity, rng);
    const Batch x = random_batch(rng, 5, 4);
    const Batch u = random_batch(rng, 5, 4);
    const Batch seed = random_batch(rng, 5, 1);
    // F(params) = sum_i seed_i * d/dt M(x_i + t u_i) at t = 0.
    const auto tangent_objective = [&](const std::vector<double>& p) {
        MlpTape tape;
        mlp_forward(net, p, x, &tape);
        std::vector<double> unused(net.param_count(), 0.0);
        const Batch tan = mlp_input_tangent_grad(net, p, tape, u, seed, unused);
        double s = 0.0;
        for (int i = 0; i < 5; ++i) {
            s += seed.data[i] * tan.data[i];
        }
        return s;
    };
    MlpTape tape;
    mlp_forward(net, x, &tape);
    std::vector<double> g(net.param_count(), 0.0);
    const Batch tan = mlp_input_tangent_grad(net, net.params(), tape, u, seed, g);

    // The tangent itself against finite differences in the input.
    Batch xp = x, xm = x;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        xp.data[i] += 1e-6 * u.data[i];
        xm.data[i] -= 1e-6 * u.data[i];
    }
    const Batch yp = mlp_forward(net, xp), ym = mlp_forward(net, xm);
    for (int i = 0; i < 5; ++i) {
        CHECK(tan.data[i] == doctest::Approx((yp.data[i] - ym.data[i]) / 2e-6).epsilon(1e-6).scale(1e-12));
    }
    const std::vector<double> p0(net.params().begin(), net.params().end());
    for (int probe = 0; probe < 5; ++probe) {
        const auto d = oracle::random_direction(rng, p0.size());
        CHECK(oracle::dot(g, d) == doctest::Approx(oracle::directional_fd(tangent_objective, p0, d, 1e-6)).epsilon(1e-6).scale(1e-12));
    }

    const Mlp tanh_net({4, 3, 1}, Activation::tanh, rng);
    MlpTape t2;
    mlp_forward(tanh_net, x, &t2);
    std::vector<double> g2(tanh_net.param_count());
    CHECK_THROWS(mlp_input_tangent_grad(tanh_net, tanh_net.params(), t2, u, seed, g2));
}

TEST_CASE("scalar and avx2 kernels give matching network gradients") {
    if (kernels::avx2_table() == nullptr) {
        return;
    }
    const kernels::Isa before = kernels::active().isa;
    PrngStream rng(8, 8);
    const Mlp net({37, 65, 33, 5}, Activation::tanh, rng);
    const Batch x = random_batch(rng, 17, 37);
    kernels::select(kernels::Isa::scalar);
    const auto gs = mlp_grad(net, x, half_square);
    const Batch ys = mlp_forward(net, x);
    kernels::select(kernels::Isa::avx2);
    const auto gv = mlp_grad(net, x, half_square);
    const Batch yv = mlp_forward(net, x);
    kernels::select(before);
    for (std::size_t i = 0; i < gs.size(); ++i) {
        REQUIRE(gv[i] == doctest::Approx(gs[i]).epsilon(1e-11));
    }
    for (std::size_t i = 0; i < ys.data.size(); ++i) {
        REQUIRE(yv.data[i] == doctest::Approx(ys.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("adam first step moves each parameter by lr against the gradient sign") {
    Adam opt(0.1, 3);
    std::vector<double> p{1.0, 2.0, 3.0};
    const std::vector<double> g{0.5, -2.0, 0.0};
    opt.step(p, g);
    CHECK(p[0] == doctest::Approx(0.9));
    CHECK(p[1] == doctest::Approx(2.1));
    CHECK(p[2] == 3.0);
    CHECK(opt.t == 1);
}

TEST_CASE("adam minimizes a quadratic") {
    Adam opt(0.05, 2);
    std::vector<double> p{3.0, -2.0};
    for (int i = 0; i < 2000; ++i) {
        const std::vector<double> g{2.0 * (p[0] - 1.0), 2.0 * (p[1] + 0.5)};
        opt.step(p, g);
    }
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(p[1] == doctest::Approx(-0.5).epsilon(1e-3));
}

TEST_CASE("replay buffer ring and sampling") {
    ReplayBuffer buf(4, 2, 1);
    for (int i = 0; i < 6; ++i) {
        const double s[] = {double(i), double(-i)};
        const double a[] = {0.1 * i};
        const double n[] = {double(i + 1), 0.0};
        buf.add(s, a, i * 10.0, n, i % 3 == 2);
    }
    CHECK(buf.size() == 4);
    const std::size_t idx[] = {0, 1, 2, 3};
    const TransitionBatch all = buf.gather(idx);
    std::vector<double> rewards = all.rewards;
    std::sort(rewards.begin(), rewards.end());
    CHECK(rewards == std::vector<double>{20.0, 30.0, 40.0, 50.0});

    PrngStream rng(9, 9);
    const TransitionBatch b = buf.sample(100, rng);
    CHECK(b.size() == 100);
    for (int i = 0; i < 100; ++i) {
        const double r = b.rewards[i];
        REQUIRE(r >= 20.0);
        CHECK(b.states(i, 0) == r / 10.0);
        CHECK(b.dones[i] == (static_cast<int>(r / 10) % 3 == 2 ? 1.0 : 0.0));
    }
    CHECK_THROWS(buf.sample_disjoint(3, 2, rng));
}

TEST_CASE("disjoint batches share no transition") {
    ReplayBuffer buf(100, 1, 1);
    for (int i = 0; i < 100; ++i) {
        const double s[] = {double(i)};
        const double a[] = {0.0};
        buf.add(s, a, double(i), s, false);
    }
    PrngStream rng(10, 10);
    for (int trial = 0; trial < 50; ++trial) {
        const auto [train, val] = buf.sample_disjoint(40, 40, rng);
        std::vector<double> ids = train.rewards;
        ids.insert(ids.end(), val.rewards.begin(), val.rewards.end());
        std::sort(ids.begin(), ids.end());
        REQUIRE(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
    }
    CHECK(buf.validation_draws() == 50);
}
