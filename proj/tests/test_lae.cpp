#include <cmath>
#include <vector>

#include "doctest.h"
#include "fenc/lae.hpp"
#include "fenc/prng.hpp"

using namespace fenc;
using namespace fenc::lae;

namespace {

RegressionProblem ones_column(const std::vector<double>& y) {
    RegressionProblem p;
    p.g = Matrix(y.size(), 1, 1.0);
    p.y = y;
    return p;
}

RegressionProblem random_problem(Prng& rng, std::size_t m, std::size_t k) {
    RegressionProblem p;
    p.g = Matrix(m, k);
    for (auto& v : p.g.flat()) v = rng.uniform(-1.0, 1.0);
    p.y.resize(m);
    for (auto& v : p.y) v = rng.uniform(-1.0, 1.0);
    return p;
}

}  // namespace

TEST_CASE("L1 fit of a constant is the median") {
    auto p = ones_column({0.0, 0.0, 10.0});
    const auto sol = solve_lae(p);
    CHECK(sol.alpha[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sol.objective == doctest::Approx(10.0).epsilon(1e-9));

    // Least squares gives the mean instead.
    const auto ls = solve_least_squares(p);
    CHECK(ls.alpha[0] == doctest::Approx(10.0 / 3.0));
}

TEST_CASE("identity system is solved exactly") {
    RegressionProblem p;
    p.g = Matrix::identity(2);
    p.y = {3.0, -4.0};
    const auto sol = solve_lae(p);
    CHECK(sol.alpha[0] == doctest::Approx(3.0));
    CHECK(sol.alpha[1] == doctest::Approx(-4.0));
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("targets in the column span give zero objective") {
    RegressionProblem p;
    p.g = Matrix(3, 2);
    p.g(0, 0) = 1; p.g(1, 0) = 0; p.g(2, 0) = 1;
    p.g(0, 1) = 0; p.g(1, 1) = 1; p.g(2, 1) = 1;
    p.y = {1.0, 2.0, 3.0};
    const auto sol = solve_lae(p);
    CHECK(sol.alpha[0] == doctest::Approx(1.0));
    CHECK(sol.alpha[1] == doctest::Approx(2.0));
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("brute force oracle agrees on the fixtures") {
    RegressionProblem ident;
    ident.g = Matrix::identity(2);
    ident.y = {3.0, -4.0};
    CHECK(brute_force_lae(ident).objective == doctest::Approx(0.0));

    auto median = ones_column({0.0, 0.0, 10.0});
    CHECK(brute_force_lae(median).objective == doctest::Approx(10.0));
}

TEST_CASE("solver matches brute force on 50 random problems") {
    Prng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_problem(rng, 8, 2);
        const auto sol = solve_lae(p);
        const auto oracle = brute_force_lae(p);
        CHECK(std::fabs(sol.objective - oracle.objective) < 1e-8);
    }
}

TEST_CASE("dantzig rule reaches the same objective") {
    Prng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        auto p = random_problem(rng, 12, 3);
        const auto a = solve_lae(p, PivotRule::bland);
        const auto b = solve_lae(p, PivotRule::dantzig);
        CHECK(std::fabs(a.objective - b.objective) < 1e-8);
    }
}

TEST_CASE("optimality certificate: random perturbations never improve") {
    Prng rng(5);
    auto p = random_problem(rng, 20, 4);
    const auto sol = solve_lae(p);
    for (int trial = 0; trial < 100; ++trial) {
        auto alpha = sol.alpha;
        for (auto& a : alpha) a += rng.uniform(-0.5, 0.5);
        CHECK(l1_objective(p, alpha) >= sol.objective - 1e-9);
    }
}

TEST_CASE("LAE ignores a growing outlier while least squares chases it") {
    double prev_ls = 0.0;
    double lae_alpha = 0.0;
    for (double outlier : {10.0, 100.0, 1000.0}) {
        auto p = ones_column({0.0, 0.0, outlier});
        const auto sol = solve_lae(p);
        const auto ls = solve_least_squares(p);
        if (outlier == 10.0) {
            lae_alpha = sol.alpha[0];
        } else {
            CHECK(sol.alpha[0] == lae_alpha);  // identical across M
        }
        CHECK(sol.alpha[0] == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(ls.alpha[0] > prev_ls);  // strictly increasing in M
        prev_ls = ls.alpha[0];
    }
}

TEST_CASE("scale equivariance of objective and predictions") {
    Prng rng(17);
    for (double c : {2.0, 10.0, 0.25}) {
        auto p = random_problem(rng, 15, 3);
        auto scaled = p;
        for (auto& v : scaled.y) v *= c;
        const auto base = solve_lae(p);
        const auto s = solve_lae(scaled);
        CHECK(s.objective == doctest::Approx(c * base.objective).epsilon(1e-8));

        std::vector<double> pred_base(p.m()), pred_scaled(p.m());
        matvec(p.g, base.alpha, pred_base);
        matvec(scaled.g, s.alpha, pred_scaled);
        for (std::size_t j = 0; j < p.m(); ++j) {
            CHECK(pred_scaled[j] == doctest::Approx(c * pred_base[j]).epsilon(1e-6).scale(std::max(1.0, std::fabs(c))));
        }
    }
}

TEST_CASE("least squares with orthonormal columns projects") {
    RegressionProblem p;
    p.g = Matrix(3, 2);
    p.g(0, 0) = 1.0;
    p.g(1, 1) = 1.0;
    p.y = {4.0, -2.0, 7.0};
    const auto ls = solve_least_squares(p);
    CHECK(ls.alpha[0] == doctest::Approx(4.0));
    CHECK(ls.alpha[1] == doctest::Approx(-2.0));
    CHECK_FALSE(ls.jittered);
}

TEST_CASE("least squares of orthogonal targets is zero") {
    RegressionProblem p;
    p.g = Matrix(2, 1);
    p.g(0, 0) = 1.0;
    p.g(1, 0) = 0.0;
    p.y = {0.0, 5.0};  // orthogonal to the column
    const auto ls = solve_least_squares(p);
    CHECK(ls.alpha[0] == doctest::Approx(0.0));
}

TEST_CASE("rank-deficient least squares is jittered and flagged") {
    RegressionProblem p;
    p.g = Matrix(3, 2);
    for (std::size_t j = 0; j < 3; ++j) {
        p.g(j, 0) = 1.0;
        p.g(j, 1) = 1.0;  // duplicate column
    }
    p.y = {1.0, 2.0, 3.0};
    const auto ls = solve_least_squares(p);
    CHECK(ls.jittered);
    // Prediction still matches the least-squares fit of the shared column.
    CHECK(ls.alpha[0] + ls.alpha[1] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("non-finite inputs are rejected") {
    RegressionProblem p;
    p.g = Matrix(2, 1, 1.0);
    p.y = {1.0, std::nan("")};
    CHECK_THROWS_AS(solve_lae(p), std::invalid_argument);
}

TEST_CASE("degenerate optimum is reported when ties exist") {
    // Two identical columns: any split of the weight is optimal.
    RegressionProblem p;
    p.g = Matrix(3, 2);
    for (std::size_t j = 0; j < 3; ++j) {
        p.g(j, 0) = 1.0;
        p.g(j, 1) = 1.0;
    }
    p.y = {1.0, 1.0, 1.0};
    const auto sol = solve_lae(p);
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sol.status == SolveStatus::degenerate_optimal);
}

TEST_CASE("single-row problems calibrate exactly on one sample") {
    RegressionProblem p;
    p.g = Matrix(1, 3);
    p.g(0, 0) = 2.0;
    p.g(0, 1) = -1.0;
    p.g(0, 2) = 0.5;
    p.y = {4.0};
    const auto sol = solve_lae(p);
    CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("irls refinement lands near the simplex objective") {
    Prng rng(33);
    auto p = random_problem(rng, 40, 3);
    const auto exact = solve_lae(p);
    const auto approx = irls_lae(p);
    CHECK(l1_objective(p, approx) <= exact.objective + 1e-3);
}

TEST_CASE("grid fallback covers the all-singular case") {
    RegressionProblem p;
    p.g = Matrix(3, 1, 0.0);  // zero column: every subset singular
    p.y = {1.0, -2.0, 0.5};
    const auto r = brute_force_lae(p);
    CHECK(r.grid_fallback);
    CHECK(r.objective == doctest::Approx(3.5));
}
