#include "fenc/diagnostics.hpp"

#include <chrono>
#include <cmath>
#include <utility>

#include "fenc/encoder.hpp"
#include "fenc/gradcheck.hpp"
#include "fenc/lae.hpp"
#include "fenc/prng.hpp"

namespace fenc::diagnostics {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

ScalarLoss quadratic_loss() {
    return {
        [](std::span<const double> y) {
            double s = 0.0;
            for (double v : y) s += 0.5 * v * v;
            return s;
        },
        [](std::span<const double> y) {
            return std::vector<double>(y.begin(), y.end());
        },
    };
}

std::vector<double> random_obs(Prng& rng, std::size_t dim) {
    std::vector<double> x(dim);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    return x;
}

double min_abs_preact(const Mlp::Tape& tape) {
    double lo = 1e30;
    for (const auto& z : tape.preacts) {
        for (double v : z) lo = std::min(lo, std::fabs(v));
    }
    return lo;
}

// Plain Mlp check. For relu nets the fixture is re-seeded until every
// pre-activation is clear of the kink.
GradCheckCase check_mlp(const std::string& name,
                        const std::vector<std::size_t>& dims, Activation act,
                        bool residual, std::uint64_t base_seed) {
    GradCheckCase c;
    c.name = name;
    for (std::uint64_t seed = base_seed;; ++seed) {
        Prng rng(seed);
        Mlp net = Mlp::create(dims, act, rng, 1.0, residual);
        Prng xs(seed + 7777);
        const auto x = random_obs(xs, dims.front());
        if (act == Activation::relu || residual) {
            Mlp::Tape tape;
            net.forward(x, &tape);
            if (min_abs_preact(tape) < 1e-3) continue;
        }
        c.max_rel_error = grad_check(net, quadratic_loss(), x, 1e-5);
        break;
    }
    c.pass = c.max_rel_error < c.threshold;
    return c;
}

struct TrainLossFixture {
    BasisNetwork net;
    Minibatch batch;
    CoefficientTable table;
    std::vector<Sample> probes;
};

// Builds a small training-loss fixture whose residuals and relu
// pre-activations all sit at least `margin` from their kinks.
TrainLossFixture make_train_fixture(const NetConfig& cfg, std::uint64_t base_seed,
                                    double margin = 1e-3) {
    for (std::uint64_t seed = base_seed;; ++seed) {
        Prng rng(seed);
        TrainLossFixture f;
        f.net = BasisNetwork::create(cfg, rng);

        std::vector<double> alpha(cfg.k);
        for (auto& a : alpha) a = rng.uniform(-1.0, 1.0);
        f.table["ctx"] = {alpha, 0};

        ContextBatch cb;
        cb.context_id = "ctx";
        bool ok = true;
        for (int j = 0; j < 4; ++j) {
            Sample s;
            s.obs = random_obs(rng, cfg.obs_dim);
            s.act.resize(cfg.action_dim);
            for (auto& a : s.act) a = rng.uniform(-1.0, 1.0);

            BasisNetwork::Tape tape;
            const auto basis = f.net.basis_eval(s.obs, &tape);
            const auto pred = combine(basis, alpha);
            for (std::size_t d = 0; d < cfg.action_dim; ++d) {
                if (std::fabs(pred[d] - s.act[d]) < margin) ok = false;
            }
            if (cfg.activation == Activation::relu) {
                if (min_abs_preact(tape.trunk) < margin) ok = false;
                for (const auto& ht : tape.heads) {
                    if (min_abs_preact(ht) < margin) ok = false;
                }
            }
            cb.samples.push_back(std::move(s));
        }
        if (!ok) continue;
        f.batch.push_back(std::move(cb));
        for (int j = 0; j < 6; ++j) {
            Sample s;
            s.obs = random_obs(rng, cfg.obs_dim);
            s.act.assign(cfg.action_dim, 0.0);
            if (cfg.activation == Activation::relu) {
                BasisNetwork::Tape tape;
                f.net.basis_eval(s.obs, &tape);
                if (min_abs_preact(tape.trunk) < margin) {
                    ok = false;
                    break;
                }
            }
            f.probes.push_back(std::move(s));
        }
        if (!ok) continue;
        return f;
    }
}

GradCheckCase check_basis(const std::string& name, NetConfig cfg,
                          std::uint64_t base_seed, double lambda) {
    GradCheckCase c;
    c.name = name;
    TrainLossFixture f = make_train_fixture(cfg, base_seed);

    auto grads = f.net.zero_grads();
    train_loss_and_grads(f.net, f.batch, f.table, f.probes, lambda, grads);

    auto params = f.net.param_blocks();
    auto analytic = grad_blocks(std::as_const(grads));
    auto value = [&]() {
        return train_loss_value(f.net, f.batch, f.table, f.probes, lambda);
    };
    c.max_rel_error =
        central_difference_max_rel_error(params, analytic, value, 1e-5);
    c.pass = c.max_rel_error < c.threshold;
    return c;
}

GradCheckCase check_monolithic(const std::string& name, NetConfig cfg,
                               std::uint64_t base_seed) {
    GradCheckCase c;
    c.name = name;
    for (std::uint64_t seed = base_seed;; ++seed) {
        Prng rng(seed);
        MonolithicNetwork net = MonolithicNetwork::create(cfg, rng);
        Sample s;
        s.obs = random_obs(rng, cfg.obs_dim);
        s.act.resize(cfg.action_dim);
        for (auto& a : s.act) a = rng.uniform(-1.0, 1.0);

        MonolithicNetwork::Tape tape;
        const auto pred = net.forward(s.obs, &tape);
        bool ok = true;
        for (std::size_t d = 0; d < cfg.action_dim; ++d) {
            if (std::fabs(pred[d] - s.act[d]) < 1e-3) ok = false;
        }
        if (cfg.activation == Activation::relu &&
            (min_abs_preact(tape.trunk) < 1e-3 || min_abs_preact(tape.head) < 1e-3)) {
            ok = false;
        }
        if (!ok) continue;

        auto grads = net.zero_grads();
        std::vector<double> sign(cfg.action_dim);
        for (std::size_t d = 0; d < cfg.action_dim; ++d) {
            sign[d] = pred[d] > s.act[d] ? 1.0 : -1.0;
        }
        net.backward(tape, sign, grads);

        auto params = net.param_blocks();
        auto analytic = grad_blocks(std::as_const(grads));
        auto value = [&]() {
            const auto y = net.forward(s.obs);
            double l = 0.0;
            for (std::size_t d = 0; d < cfg.action_dim; ++d) {
                l += std::fabs(y[d] - s.act[d]);
            }
            return l;
        };
        c.max_rel_error =
            central_difference_max_rel_error(params, analytic, value, 1e-5);
        break;
    }
    c.pass = c.max_rel_error < c.threshold;
    return c;
}

}  // namespace

GradCheckReport run_grad_check_sweep() {
    const auto t0 = Clock::now();
    GradCheckReport report;

    // Plain Mlps across activations, depths, and the residual flavor.
    report.cases.push_back(check_mlp("mlp-linear", {3, 2}, Activation::identity, false, 11));
    report.cases.push_back(check_mlp("mlp-tanh-shallow", {3, 8, 2}, Activation::tanh, false, 12));
    report.cases.push_back(check_mlp("mlp-tanh-deep", {4, 8, 8, 8, 2}, Activation::tanh, false, 13));
    report.cases.push_back(check_mlp("mlp-relu-shallow", {3, 8, 2}, Activation::relu, false, 14));
    report.cases.push_back(check_mlp("mlp-relu-deep", {4, 12, 12, 3}, Activation::relu, false, 15));
    report.cases.push_back(check_mlp("mlp-relu-residual", {4, 6, 6, 6, 2}, Activation::relu, true, 16));
    report.cases.push_back(check_mlp("mlp-tanh-residual", {3, 5, 5, 5, 1}, Activation::tanh, true, 17));
    report.cases.push_back(check_mlp("mlp-wide", {2, 32, 1}, Activation::tanh, false, 18));

    NetConfig fused;
    fused.obs_dim = 3;
    fused.trunk_hidden = {10, 10};
    fused.k = 4;
    fused.action_dim = 2;

    NetConfig fused_tanh = fused;
    fused_tanh.activation = Activation::tanh;

    NetConfig per_head = fused;
    per_head.head_mode = HeadMode::per_head;

    NetConfig per_head_hidden = per_head;
    per_head_hidden.head_hidden = {6};

    NetConfig residual = fused;
    residual.residual_trunk = true;

    NetConfig tall = fused;
    tall.k = 7;
    tall.action_dim = 1;

    // The basis-network architectures, data term only.
    report.cases.push_back(check_basis("basis-fused-relu", fused, 21, 0.0));
    report.cases.push_back(check_basis("basis-fused-tanh", fused_tanh, 22, 0.0));
    report.cases.push_back(check_basis("basis-per-head", per_head, 23, 0.0));
    report.cases.push_back(check_basis("basis-per-head-hidden", per_head_hidden, 24, 0.0));
    report.cases.push_back(check_basis("basis-residual-trunk", residual, 25, 0.0));
    report.cases.push_back(check_basis("basis-k7-da1", tall, 26, 0.0));

    // Full training loss with the Gram regularizer at lambda = 1.
    report.cases.push_back(check_basis("train-loss-fused-lambda1", fused, 31, 1.0));
    report.cases.push_back(check_basis("train-loss-tanh-lambda1", fused_tanh, 32, 1.0));
    report.cases.push_back(check_basis("train-loss-per-head-lambda1", per_head, 33, 1.0));
    report.cases.push_back(check_basis("train-loss-residual-lambda1", residual, 34, 1.0));

    // The monolithic baseline under the same L1 objective.
    report.cases.push_back(check_monolithic("monolithic-relu", fused, 41));
    NetConfig mono_tanh = fused_tanh;
    report.cases.push_back(check_monolithic("monolithic-tanh", mono_tanh, 42));

    report.all_pass = true;
    for (const auto& c : report.cases) report.all_pass = report.all_pass && c.pass;
    report.elapsed_s = seconds_since(t0);
    return report;
}

SolverCheckReport run_solver_check(std::size_t n_problems, std::uint64_t seed) {
    const auto t0 = Clock::now();
    SolverCheckReport report;
    report.total = n_problems;

    Prng rng(seed);
    for (std::size_t trial = 0; trial < n_problems; ++trial) {
        const std::size_t k = 1 + rng.below(3);
        const std::size_t m = k + rng.below(11 - k);  // k..10
        lae::RegressionProblem p;
        p.g = Matrix(m, k);
        for (auto& v : p.g.flat()) v = rng.uniform(-1.0, 1.0);
        p.y.resize(m);
        for (auto& v : p.y) v = rng.uniform(-1.0, 1.0);

        const auto sol = lae::solve_lae(p);
        const auto oracle = lae::brute_force_lae(p);
        const double gap = std::fabs(sol.objective - oracle.objective);
        report.max_gap = std::max(report.max_gap, gap);
        if (gap < 1e-8) ++report.passed;
    }
    report.all_pass = report.passed == report.total;
    report.elapsed_s = seconds_since(t0);
    return report;
}

}  // namespace fenc::diagnostics
