#include <vector>

#include "doctest.h"
#include "fenc/kernels.hpp"
#include "fenc/prng.hpp"

using namespace fenc;

namespace {

std::vector<double> random_vec(Prng& rng, std::size_t n, double lo = -2.0,
                               double hi = 2.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("dot matches naive reference on small inputs") {
    const double a[] = {1.0, 2.0, 3.0};
    const double b[] = {4.0, 5.0, 6.0};
    CHECK(kernels::dot(a, b, 3) == doctest::Approx(32.0));
    CHECK(kernels::sum_abs(a, 3) == doctest::Approx(6.0));
    CHECK(kernels::sum_abs_diff(a, b, 3) == doctest::Approx(9.0));
}

TEST_CASE("scalar and avx2 backends are bit-identical") {
    if (!kernels::avx2_supported()) return;

    Prng rng(123);
    // Sizes straddle the 4-lane boundary to exercise tails.
    for (std::size_t n : {1u, 3u, 4u, 5u, 8u, 17u, 64u, 255u, 1024u, 1025u}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);

        REQUIRE(kernels::set_backend(kernels::Backend::scalar));
        const double dot_s = kernels::dot(a.data(), b.data(), n);
        const double abs_s = kernels::sum_abs(a.data(), n);
        const double diff_s = kernels::sum_abs_diff(a.data(), b.data(), n);
        auto y_s = b;
        kernels::axpy(0.37, a.data(), y_s.data(), n);

        REQUIRE(kernels::set_backend(kernels::Backend::avx2));
        const double dot_v = kernels::dot(a.data(), b.data(), n);
        const double abs_v = kernels::sum_abs(a.data(), n);
        const double diff_v = kernels::sum_abs_diff(a.data(), b.data(), n);
        auto y_v = b;
        kernels::axpy(0.37, a.data(), y_v.data(), n);

        CHECK(dot_s == dot_v);
        CHECK(abs_s == abs_v);
        CHECK(diff_s == diff_v);
        CHECK(y_s == y_v);
    }
    kernels::set_backend(kernels::Backend::scalar);
}

TEST_CASE("adam kernel is bit-identical across backends") {
    if (!kernels::avx2_supported()) return;

    Prng rng(7);
    for (std::size_t n : {1u, 4u, 7u, 129u}) {
        auto p0 = random_vec(rng, n);
        auto m0 = random_vec(rng, n, 0.0, 1.0);
        auto v0 = random_vec(rng, n, 0.0, 1.0);
        auto g = random_vec(rng, n);

        auto ps = p0, ms = m0, vs = v0;
        REQUIRE(kernels::set_backend(kernels::Backend::scalar));
        kernels::adam_update(ps.data(), ms.data(), vs.data(), g.data(), n, 1e-3,
                             0.9, 0.999, 1e-8, 0.1, 0.001999);

        auto pv = p0, mv = m0, vv = v0;
        REQUIRE(kernels::set_backend(kernels::Backend::avx2));
        kernels::adam_update(pv.data(), mv.data(), vv.data(), g.data(), n, 1e-3,
                             0.9, 0.999, 1e-8, 0.1, 0.001999);

        CHECK(ps == pv);
        CHECK(ms == mv);
        CHECK(vs == vv);
    }
    kernels::set_backend(kernels::Backend::scalar);
}

TEST_CASE("prng streams are reproducible and seed-sensitive") {
    Prng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
    }
    bool differs = false;
    Prng a2(42);
    for (int i = 0; i < 10; ++i) {
        if (a2.next_u64() != c.next_u64()) differs = true;
    }
    CHECK(differs);

    // Reference values for xoshiro256** seeded via splitmix64(0):
    // state words are the first four splitmix64 outputs, and the first
    // result is rotl(s1*5, 7)*9 computed from those words.
    Prng zero(0);
    std::uint64_t x = 0;
    std::uint64_t s[4];
    for (auto& w : s) w = Prng::splitmix64(x);
    auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    CHECK(zero.next_u64() == rotl(s[1] * 5, 7) * 9);
}

TEST_CASE("uniform stays in range and below is unbiased at the edges") {
    Prng rng(9);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(rng.below(7) < 7);
    }
}

TEST_CASE("derived streams differ from parent and from each other") {
    Prng root(5);
    Prng d1 = root.derive(1);
    Prng d2 = root.derive(2);
    CHECK(d1.next_u64() != d2.next_u64());
}
