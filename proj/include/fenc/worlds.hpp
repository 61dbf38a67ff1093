#pragma once

// Desk-scale multi-context data generators with known expert behavior.
//
// fn1d: f_c(x) = a sin(3x) + b cos(2x) + d x on [-pi, pi]. The family spans
// an exactly 3-dimensional function space, so the basis dimension needed to
// represent it is known.
//
// grid: a unit-square reaching world whose hidden context is an invertible
// 2x2 action transform M_c (rotation times scale). The agent commands an
// action a, the world moves the position by step_size * M_c * a. The expert
// knows M_c and steers straight at the goal; a learner only sees [pos, goal]
// and must infer the context from demonstrations.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fenc/data.hpp"
#include "fenc/matrix.hpp"

namespace fenc::worlds {

struct FunctionContext1D {
    std::string context_id;
    double a = 0.0;
    double b = 0.0;
    double d = 0.0;
};

double expert_1d(const FunctionContext1D& ctx, double x);

struct GridContext {
    std::string context_id;
    double theta = 0.0;  // rotation angle in [0, 2pi)
    double scale = 1.0;  // in [0.5, 2]

    // M_c = scale * R(theta)
    std::array<double, 4> transform() const;
    std::array<double, 4> inverse_transform() const;
};

struct GridState {
    double px = 0.0, py = 0.0;  // position in [0,1]^2
    double gx = 0.0, gy = 0.0;  // goal in [0,1]^2

    std::vector<double> obs() const { return {px, py, gx, gy}; }
    double distance_to_goal() const;
};

constexpr double kDefaultStepSize = 0.05;
constexpr double kDefaultSuccessRadius = 0.05;
constexpr std::size_t kDefaultEvalHorizon = 80;

// pos' = clip_to_unit_square(pos + step_size * M_c * action); goal unchanged.
// Precondition: ||action||_inf <= 1.
GridState grid_step(const GridState& s, std::span<const double> action,
                    const GridContext& ctx, double step_size);

// Expert action: u = M_c^{-1} (goal - pos) scaled to unit infinity-norm,
// with braking near the goal (divisor never drops below step_size) so the
// realized motion never overshoots and the goal distance is monotone.
std::vector<double> grid_expert(const GridState& s, const GridContext& ctx,
                                double step_size = kDefaultStepSize);

// The un-normalized expert field M_c^{-1}(goal - pos); linear in the entries
// of M_c^{-1}.
std::vector<double> grid_expert_raw(const GridState& s, const GridContext& ctx);

using Policy = std::function<std::vector<double>(std::span<const double> obs)>;

struct RolloutResult {
    Trajectory trajectory;
    bool success = false;
    std::size_t steps_to_success = 0;
};

// Runs the policy for `horizon` steps, recording (obs, action) pairs.
// Success iff the position comes within `success_radius` of the goal at any
// time; a non-finite policy output aborts the rollout as a failure.
RolloutResult rollout(const Policy& policy, const GridContext& ctx,
                      const GridState& start, std::size_t horizon,
                      double step_size = kDefaultStepSize,
                      double success_radius = kDefaultSuccessRadius);

struct WorldConfig {
    std::string kind = "grid";  // "grid" | "fn1d"
    std::size_t train_contexts = 8;
    std::size_t holdout_contexts = 5;
    std::uint64_t seed = 1;

    // grid
    std::size_t trajectories_per_context = 20;
    std::size_t horizon = 40;
    double step_size = kDefaultStepSize;

    // fn1d
    std::size_t samples_per_context = 1200;
    double coeff_range = 2.0;   // |a|,|b|,|d| <= coeff_range
    double noise_scale = 0.0;   // Laplace label noise

    void validate() const;
};

struct GeneratedData {
    WorldConfig config;
    std::vector<ContextDataset> train;    // seen during gradient training
    std::vector<ContextDataset> holdout;  // OOD: only ever used for calibration/eval
    std::vector<GridContext> grid_contexts;        // kind == "grid"
    std::vector<FunctionContext1D> fn1d_contexts;  // kind == "fn1d"

    const ContextDataset* find(const std::string& context_id) const;
    const GridContext* find_grid_context(const std::string& context_id) const;
    const FunctionContext1D* find_fn1d_context(const std::string& context_id) const;
    bool is_holdout(const std::string& context_id) const;
};

// Deterministic given the config (all randomness from config.seed). Expert
// actions throughout; train/holdout split is by context.
GeneratedData generate_dataset(const WorldConfig& cfg);

// Fresh expert demonstration in one grid context (start/goal drawn from the
// given rng seed); used for one-shot adaptation experiments.
Trajectory expert_demo(const GridContext& ctx, std::size_t horizon,
                       double step_size, std::uint64_t seed);

}  // namespace fenc::worlds
