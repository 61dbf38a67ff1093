#include <cmath>
#include <vector>

#include "doctest.h"
#include "fenc/adam.hpp"
#include "fenc/gradcheck.hpp"
#include "fenc/kernels.hpp"
#include "fenc/matrix.hpp"
#include "fenc/mlp.hpp"
#include "fenc/prng.hpp"

using namespace fenc;

namespace {

ScalarLoss sum_loss() {
    return {
        [](std::span<const double> y) {
            double s = 0.0;
            for (double v : y) s += v;
            return s;
        },
        [](std::span<const double> y) { return std::vector<double>(y.size(), 1.0); },
    };
}

ScalarLoss quadratic_loss() {
    return {
        [](std::span<const double> y) {
            double s = 0.0;
            for (double v : y) s += 0.5 * v * v;
            return s;
        },
        [](std::span<const double> y) { return std::vector<double>(y.begin(), y.end()); },
    };
}

Mlp single_linear(std::size_t dim) {
    Prng rng(0);
    Mlp net = Mlp::create({dim, dim}, Activation::identity, rng);
    auto& layer = net.layers()[0];
    layer.w = Matrix::identity(dim);
    layer.b.assign(dim, 0.0);
    return net;
}

// Straight-line re-evaluation of an Mlp with plain nested loops; shares no
// code with Mlp::forward.
std::vector<double> loop_oracle_forward(const Mlp& net, const std::vector<double>& x) {
    std::vector<double> h = x;
    for (const auto& layer : net.layers()) {
        std::vector<double> z(layer.out_dim(), 0.0);
        for (std::size_t r = 0; r < layer.out_dim(); ++r) {
            double acc = layer.b[r];
            for (std::size_t c = 0; c < layer.in_dim(); ++c) {
                acc += layer.w(r, c) * h[c];
            }
            z[r] = acc;
        }
        for (std::size_t r = 0; r < z.size(); ++r) {
            switch (layer.act) {
                case Activation::relu: z[r] = z[r] > 0 ? z[r] : 0.0; break;
                case Activation::tanh: z[r] = std::tanh(z[r]); break;
                case Activation::identity: break;
            }
            if (layer.residual) z[r] += h[r];
        }
        h = z;
    }
    return h;
}

}  // namespace

TEST_CASE("identity single layer passes input through") {
    Mlp net = single_linear(2);
    const std::vector<double> x{1.0, 2.0};
    const auto y = net.forward(x);
    CHECK(y == x);
}

TEST_CASE("relu layer clamps negatives") {
    Prng rng(0);
    Mlp net = Mlp::create({2, 2, 2}, Activation::relu, rng);
    net.layers()[0].w = Matrix::identity(2);
    net.layers()[1].w = Matrix::identity(2);
    const auto y = net.forward(std::vector<double>{-1.0, 3.0});
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 3.0);
}

TEST_CASE("seeded random net matches straight-line loop oracle") {
    Prng rng(7);
    Mlp net = Mlp::create({3, 5, 2}, Activation::tanh, rng);
    Prng xs(11);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> x{xs.uniform(-1, 1), xs.uniform(-1, 1), xs.uniform(-1, 1)};
        const auto got = net.forward(x);
        const auto want = loop_oracle_forward(net, x);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("linear forward equals explicit matrix product") {
    Prng rng(3);
    Mlp net = Mlp::create({4, 3}, Activation::identity, rng);
    std::vector<double> x{0.5, -1.0, 2.0, 0.25};
    const auto y = net.forward(x);
    std::vector<double> want(3);
    matvec(net.layers()[0].w, x, want);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::fabs(y[i] - want[i]) < 1e-12);
    }
}

TEST_CASE("forward rejects dimension mismatch") {
    Mlp net = single_linear(2);
    CHECK_THROWS_AS(net.forward(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("backward of linear net gives input as weight-row gradient") {
    Mlp net = single_linear(3);
    const std::vector<double> x{1.5, -2.0, 0.5};
    Mlp::Tape tape;
    net.forward(x, &tape);
    MlpGrads grads = net.zero_grads();
    std::vector<double> grad_out{1.0, 0.0, 0.0};  // e_1
    net.backward(tape, grad_out, grads);
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(grads.w[0](0, c) == doctest::Approx(x[c]));
        CHECK(grads.w[0](1, c) == 0.0);
        CHECK(grads.w[0](2, c) == 0.0);
    }
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
    Prng rng(5);
    Mlp net = Mlp::create({2, 4, 2}, Activation::tanh, rng);
    Mlp::Tape tape;
    net.forward(std::vector<double>{0.3, -0.7}, &tape);
    MlpGrads grads = net.zero_grads();
    net.backward(tape, std::vector<double>{0.0, 0.0}, grads);
    for (const auto& w : grads.w) {
        for (double v : w.flat()) CHECK(v == 0.0);
    }
}

TEST_CASE("grad_check: linear net with quadratic loss is exact") {
    Prng rng(1);
    Mlp net = Mlp::create({3, 2}, Activation::identity, rng);
    const std::vector<double> x{0.2, -0.4, 0.9};
    CHECK(grad_check(net, quadratic_loss(), x, 1e-4) < 1e-8);
}

TEST_CASE("grad_check: random tanh nets pass at 1e-4") {
    for (std::uint64_t seed : {2u, 3u, 4u}) {
        Prng rng(seed);
        Mlp net = Mlp::create({3, 8, 8, 2}, Activation::tanh, rng);
        Prng xs(seed + 100);
        std::vector<double> x{xs.uniform(-1, 1), xs.uniform(-1, 1), xs.uniform(-1, 1)};
        CHECK(grad_check(net, quadratic_loss(), x, 1e-5) < 1e-4);
    }
}

TEST_CASE("grad_check: relu and residual flavors pass") {
    Prng rng(9);
    Mlp net = Mlp::create({4, 6, 6, 3}, Activation::relu, rng, 1.0, true);
    std::vector<double> x{0.9, -0.3, 0.5, 0.1};
    CHECK(grad_check(net, quadratic_loss(), x, 1e-5) < 1e-4);
}

TEST_CASE("grad_check flags a corrupted gradient") {
    Prng rng(6);
    Mlp net = Mlp::create({3, 5, 2}, Activation::tanh, rng);
    const std::vector<double> x{0.4, 0.8, -0.6};
    auto loss = quadratic_loss();

    Mlp::Tape tape;
    const auto y = net.forward(x, &tape);
    MlpGrads grads = net.zero_grads();
    net.backward(tape, loss.grad(y), grads);
    grads.w[0](0, 0) *= 2.0;  // inject a fault
    CHECK(grad_check_against(net, loss, x, 1e-5, grads) > 1e-1);
}

TEST_CASE("adam leaves params unchanged on zero gradients") {
    std::vector<double> p{1.0, -2.0, 3.0};
    std::vector<double> g{0.0, 0.0, 0.0};
    std::vector<std::span<double>> params{std::span<double>(p)};
    std::vector<std::span<const double>> grads{std::span<const double>(g)};
    AdamState opt = AdamState::create(params, 1e-3);
    CHECK(adam_step(params, grads, opt, 10));
    CHECK(p == std::vector<double>{1.0, -2.0, 3.0});
    CHECK(opt.t == 1);
}

TEST_CASE("warmup scales the first step to lr/warmup") {
    std::vector<double> p{0.0};
    std::vector<double> g{1.0};
    std::vector<std::span<double>> params{std::span<double>(p)};
    std::vector<std::span<const double>> grads{std::span<const double>(g)};
    AdamState opt = AdamState::create(params, 1e-3);
    CHECK(adam_effective_lr(opt, 10) == doctest::Approx(1e-4));
    CHECK(adam_step(params, grads, opt, 10));
    // With constant unit gradient, bias-corrected m-hat and v-hat are both 1,
    // so the first update is lr_eff / (1 + eps).
    CHECK(p[0] == doctest::Approx(-1e-4).epsilon(1e-6));
}

TEST_CASE("three steps of constant gradient match the scripted recurrence") {
    std::vector<double> p{0.5};
    std::vector<double> g{1.0};
    std::vector<std::span<double>> params{std::span<double>(p)};
    std::vector<std::span<const double>> grads{std::span<const double>(g)};
    AdamState opt = AdamState::create(params, 1e-2);
    const std::uint64_t warmup = 10;
    for (int i = 0; i < 3; ++i) REQUIRE(adam_step(params, grads, opt, warmup));

    // Independent scalar recurrence.
    double m = 0.0, v = 0.0, x = 0.5;
    for (int t = 1; t <= 3; ++t) {
        const double lr_eff = 1e-2 * std::min(1.0, static_cast<double>(t) / warmup);
        m = 0.9 * m + 0.1 * 1.0;
        v = 0.999 * v + 0.001 * 1.0;
        const double mhat = m / (1.0 - std::pow(0.9, t));
        const double vhat = v / (1.0 - std::pow(0.999, t));
        x -= lr_eff * mhat / (std::sqrt(vhat) + 1e-8);
    }
    CHECK(p[0] == doctest::Approx(x).epsilon(1e-12));
    CHECK(opt.t == 3);
}

TEST_CASE("non-finite gradients reject the step") {
    std::vector<double> p{1.0};
    std::vector<double> g{std::nan("")};
    std::vector<std::span<double>> params{std::span<double>(p)};
    std::vector<std::span<const double>> grads{std::span<const double>(g)};
    AdamState opt = AdamState::create(params, 1e-3);
    CHECK_FALSE(adam_step(params, grads, opt, 10));
    CHECK(p[0] == 1.0);
    CHECK(opt.t == 0);
}

TEST_CASE("determinism: same seed gives bit-identical forward results") {
    auto build = [] {
        Prng rng(77);
        return Mlp::create({3, 16, 16, 2}, Activation::relu, rng);
    };
    Mlp a = build();
    Mlp b = build();
    std::vector<double> x{0.1, 0.2, 0.3};
    CHECK(a.forward(x) == b.forward(x));
}

TEST_CASE("grad_check uses sum loss for linear exactness too") {
    Prng rng(13);
    Mlp net = Mlp::create({2, 3}, Activation::identity, rng);
    const std::vector<double> x{1.0, -1.0};
    CHECK(grad_check(net, sum_loss(), x, 1e-3) < 1e-8);
}
