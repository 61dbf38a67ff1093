#pragma once

// Experiment pipelines shared by the CLI and the acceptance suite: training
// runs (function encoder + monolithic baseline), the mixed-context
// overfitting demo on the 1D family, gridworld rollout scoring, and one-shot
// adaptation from a single expert demonstration.

#include <cstdint>
#include <string>
#include <vector>

#include "fenc/analysis.hpp"
#include "fenc/encoder.hpp"
#include "fenc/io.hpp"
#include "fenc/worlds.hpp"

namespace fenc::experiments {

// Desk-scale defaults sized so every experiment runs on a laptop CPU.
io::ExperimentConfig default_fn1d_config(std::uint64_t seed = 1);
io::ExperimentConfig default_grid_config(std::uint64_t seed = 1);

struct TrainedModels {
    worlds::GeneratedData data;
    TrainState fe;
    MonoTrainState mono;
    bool has_mono = false;
};

TrainedModels run_training(const io::ExperimentConfig& cfg, bool with_baseline,
                           const StepObserver& on_step = nullptr);
TrainedModels run_training_on(worlds::GeneratedData data,
                              const io::ExperimentConfig& cfg, bool with_baseline,
                              const StepObserver& on_step = nullptr);

struct OverfitReport {
    analysis::EvalReport fe_report;
    analysis::EvalReport mono_report;
    double fe_train_l1 = 0.0;
    double fe_holdout_l1 = 0.0;
    double mono_train_l1 = 0.0;
    double mono_holdout_l1 = 0.0;
    double reg_initial = 0.0;
    double reg_final = 0.0;
    std::string curves_csv;  // x,context_id,target,fe_pred,mono_pred
};

// Trains the function encoder and the monolithic baseline on the same pooled
// 1D multi-context data, then evaluates both on train contexts and the
// held-out function.
OverfitReport run_overfit_demo(const io::ExperimentConfig& cfg,
                               TrainedModels* keep_models = nullptr);

struct RolloutScore {
    std::size_t successes = 0;
    std::size_t episodes = 0;
};

// Fresh (start, goal) episodes under the policy alpha^T B(s).
RolloutScore rollout_success(const BasisNetwork& net,
                             std::span<const double> alpha,
                             const worlds::GridContext& ctx, std::size_t episodes,
                             std::size_t horizon, double step_size,
                             double success_radius, std::uint64_t seed);

struct OneShotContextResult {
    std::string context_id;
    RolloutScore adapted;        // after one-demo calibration
    RolloutScore uncalibrated;   // alpha = mean of training coefficients
    double adapt_wall_ms = 0.0;
    std::size_t demo_pairs = 0;
};

struct OneShotReport {
    std::vector<OneShotContextResult> contexts;
    double mean_adapted_rate = 0.0;
    double mean_uncalibrated_rate = 0.0;
};

// For each held-out context: one expert demonstration, gradient-free
// adaptation, then rollouts on fresh episodes; compared against the
// mean-coefficient fallback policy.
OneShotReport run_one_shot(const TrainState& fe, const worlds::GeneratedData& data,
                           std::size_t demo_horizon, std::size_t episodes,
                           std::size_t rollout_horizon, std::uint64_t seed);

// Rotation-angle family label for clustering analysis: three bands of
// 120 degrees each.
std::string theta_family(const worlds::GridContext& ctx);

}  // namespace fenc::experiments
