#include "fenc/experiments.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "fenc/prng.hpp"

namespace fenc::experiments {

namespace {

using Clock = std::chrono::steady_clock;

}  // namespace

io::ExperimentConfig default_fn1d_config(std::uint64_t seed) {
    io::ExperimentConfig cfg;
    cfg.world.kind = "fn1d";
    cfg.world.train_contexts = 6;
    cfg.world.holdout_contexts = 1;
    cfg.world.samples_per_context = 1200;
    cfg.world.coeff_range = 2.0;
    cfg.world.seed = seed;

    cfg.net.obs_dim = 1;
    cfg.net.trunk_hidden = {64, 64};
    cfg.net.action_dim = 1;
    cfg.net.activation = Activation::relu;

    cfg.train.k = 3;
    cfg.train.lr = 1e-3;
    cfg.train.total_steps = 2000;
    cfg.train.batch_size = 64;
    cfg.train.seed = seed;

    cfg.calib_samples = 512;
    return cfg;
}

io::ExperimentConfig default_grid_config(std::uint64_t seed) {
    io::ExperimentConfig cfg;
    cfg.world.kind = "grid";
    cfg.world.train_contexts = 8;
    cfg.world.holdout_contexts = 5;
    cfg.world.trajectories_per_context = 30;
    cfg.world.horizon = 40;
    cfg.world.seed = seed;

    cfg.net.obs_dim = 4;
    cfg.net.trunk_hidden = {128, 128};
    cfg.net.action_dim = 2;
    cfg.net.activation = Activation::relu;

    cfg.train.k = 8;
    cfg.train.lr = 1e-3;
    cfg.train.total_steps = 3000;
    cfg.train.batch_size = 64;
    cfg.train.seed = seed;

    cfg.calib_samples = 512;
    return cfg;
}

TrainedModels run_training(const io::ExperimentConfig& cfg, bool with_baseline,
                           const StepObserver& on_step) {
    return run_training_on(worlds::generate_dataset(cfg.world), cfg,
                           with_baseline, on_step);
}

TrainedModels run_training_on(worlds::GeneratedData data,
                              const io::ExperimentConfig& cfg, bool with_baseline,
                              const StepObserver& on_step) {
    TrainedModels out;
    out.fe = train(cfg.train, cfg.net, data.train, on_step);
    if (with_baseline) {
        NetConfig mono_cfg = cfg.net;
        mono_cfg.k = cfg.train.k;
        out.mono = train_monolithic(cfg.train, mono_cfg, data.train);
        out.has_mono = true;
    }
    out.data = std::move(data);
    return out;
}

OverfitReport run_overfit_demo(const io::ExperimentConfig& cfg,
                               TrainedModels* keep_models) {
    OverfitReport report;
    TrainedModels models = run_training(cfg, true);
    if (models.fe.diverged || models.mono.diverged) {
        throw std::runtime_error("overfit demo: training diverged at step " +
                                 std::to_string(models.fe.diverged
                                                    ? models.fe.diverged_at_step
                                                    : models.mono.diverged_at_step));
    }

    report.fe_report = analysis::eval_contexts(models.fe.net, models.data,
                                               cfg.calib_samples);
    report.mono_report = analysis::eval_monolithic(models.mono.net, models.data,
                                                   cfg.calib_samples);
    report.fe_train_l1 = report.fe_report.aggregate_train;
    report.fe_holdout_l1 = report.fe_report.aggregate_ood;
    report.mono_train_l1 = report.mono_report.aggregate_train;
    report.mono_holdout_l1 = report.mono_report.aggregate_ood;
    if (!models.fe.history.empty()) {
        report.reg_initial = models.fe.history.front().loss_reg;
        report.reg_final = models.fe.history.back().loss_reg;
    }

    // Per-x prediction curves for every context, using each context's
    // calibrated coefficients from the evaluation report.
    std::map<std::string, std::vector<double>> alphas;
    for (const auto& row : report.fe_report.rows) {
        alphas[row.context_id] = row.alpha;
    }
    std::string csv = "x,context_id,target,fe_pred,mono_pred\n";
    const std::size_t points = 201;
    const double pi = std::numbers::pi;
    for (const auto& ctx : models.data.fn1d_contexts) {
        const auto& alpha = alphas.at(ctx.context_id);
        for (std::size_t i = 0; i < points; ++i) {
            const double x = -pi + 2.0 * pi * static_cast<double>(i) /
                                        static_cast<double>(points - 1);
            const std::vector<double> obs{x};
            const double target = worlds::expert_1d(ctx, x);
            const double fe = policy_action(models.fe.net, alpha, obs)[0];
            const double mono = models.mono.net.forward(obs)[0];
            csv += io::format_double(x) + "," + ctx.context_id + "," +
                   io::format_double(target) + "," + io::format_double(fe) + "," +
                   io::format_double(mono) + "\n";
        }
    }
    report.curves_csv = std::move(csv);

    if (keep_models) *keep_models = std::move(models);
    return report;
}

RolloutScore rollout_success(const BasisNetwork& net,
                             std::span<const double> alpha,
                             const worlds::GridContext& ctx, std::size_t episodes,
                             std::size_t horizon, double step_size,
                             double success_radius, std::uint64_t seed) {
    RolloutScore score;
    score.episodes = episodes;
    const std::vector<double> a(alpha.begin(), alpha.end());
    const worlds::Policy policy = [&](std::span<const double> obs) {
        return policy_action(net, a, obs);
    };
    Prng rng(seed);
    for (std::size_t e = 0; e < episodes; ++e) {
        worlds::GridState start;
        do {
            start.px = rng.uniform(0.05, 0.95);
            start.py = rng.uniform(0.05, 0.95);
            start.gx = rng.uniform(0.05, 0.95);
            start.gy = rng.uniform(0.05, 0.95);
        } while (start.distance_to_goal() < 0.2);
        const auto result =
            worlds::rollout(policy, ctx, start, horizon, step_size, success_radius);
        if (result.success) ++score.successes;
    }
    return score;
}

OneShotReport run_one_shot(const TrainState& fe, const worlds::GeneratedData& data,
                           std::size_t demo_horizon, std::size_t episodes,
                           std::size_t rollout_horizon, std::uint64_t seed) {
    OneShotReport report;
    const auto mean_alpha = mean_coefficients(fe.coefficients);
    const double step_size = data.config.step_size;

    std::size_t ctx_index = 0;
    for (const auto& ds : data.holdout) {
        const auto* ctx = data.find_grid_context(ds.context_id);
        require(ctx != nullptr, "run_one_shot: context missing from manifest");

        OneShotContextResult r;
        r.context_id = ds.context_id;

        const auto demo = worlds::expert_demo(*ctx, demo_horizon, step_size,
                                              seed + 31 * ctx_index);
        r.demo_pairs = demo.steps.size();
        const auto t0 = Clock::now();
        const auto coeff = adapt_one_shot(fe.net, demo);
        r.adapt_wall_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

        r.adapted = rollout_success(fe.net, coeff.values, *ctx, episodes,
                                    rollout_horizon, step_size,
                                    worlds::kDefaultSuccessRadius,
                                    seed + 1000 + 31 * ctx_index);
        r.uncalibrated = rollout_success(fe.net, mean_alpha, *ctx, episodes,
                                         rollout_horizon, step_size,
                                         worlds::kDefaultSuccessRadius,
                                         seed + 1000 + 31 * ctx_index);
        report.contexts.push_back(std::move(r));
        ++ctx_index;
    }

    double adapted = 0.0, uncal = 0.0;
    for (const auto& r : report.contexts) {
        adapted += static_cast<double>(r.adapted.successes) /
                   static_cast<double>(r.adapted.episodes);
        uncal += static_cast<double>(r.uncalibrated.successes) /
                 static_cast<double>(r.uncalibrated.episodes);
    }
    const double n = static_cast<double>(report.contexts.size());
    report.mean_adapted_rate = n > 0 ? adapted / n : 0.0;
    report.mean_uncalibrated_rate = n > 0 ? uncal / n : 0.0;
    return report;
}

std::string theta_family(const worlds::GridContext& ctx) {
    const double band = 2.0 * std::numbers::pi / 3.0;
    const int idx = std::min(2, static_cast<int>(ctx.theta / band));
    return "band-" + std::to_string(idx);
}

}  // namespace fenc::experiments
