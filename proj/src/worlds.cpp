#include "fenc/worlds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fenc/prng.hpp"

namespace fenc::worlds {

namespace {

constexpr double kPi = std::numbers::pi;

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

std::string padded(std::size_t i) {
    std::string s = std::to_string(i);
    while (s.size() < 2) s.insert(s.begin(), '0');
    return s;
}

}  // namespace

double expert_1d(const FunctionContext1D& ctx, double x) {
    return ctx.a * std::sin(3.0 * x) + ctx.b * std::cos(2.0 * x) + ctx.d * x;
}

std::array<double, 4> GridContext::transform() const {
    const double c = std::cos(theta), s = std::sin(theta);
    return {scale * c, -scale * s, scale * s, scale * c};
}

std::array<double, 4> GridContext::inverse_transform() const {
    // (scale * R)^-1 = R^T / scale
    const double c = std::cos(theta), s = std::sin(theta);
    const double inv = 1.0 / scale;
    return {inv * c, inv * s, -inv * s, inv * c};
}

double GridState::distance_to_goal() const {
    return std::hypot(gx - px, gy - py);
}

GridState grid_step(const GridState& s, std::span<const double> action,
                    const GridContext& ctx, double step_size) {
    require(action.size() == 2, "grid_step: action must be 2-dimensional");
    const auto m = ctx.transform();
    const double dx = m[0] * action[0] + m[1] * action[1];
    const double dy = m[2] * action[0] + m[3] * action[1];
    GridState out = s;
    out.px = clip01(s.px + step_size * dx);
    out.py = clip01(s.py + step_size * dy);
    return out;
}

std::vector<double> grid_expert_raw(const GridState& s, const GridContext& ctx) {
    const auto mi = ctx.inverse_transform();
    const double ex = s.gx - s.px;
    const double ey = s.gy - s.py;
    return {mi[0] * ex + mi[1] * ey, mi[2] * ex + mi[3] * ey};
}

std::vector<double> grid_expert(const GridState& s, const GridContext& ctx,
                                double step_size) {
    auto u = grid_expert_raw(s, ctx);
    const double norm_inf = std::max(std::fabs(u[0]), std::fabs(u[1]));
    if (norm_inf == 0.0) return {0.0, 0.0};
    // Dividing by at least step_size brakes near the goal: the realized
    // motion step*M*a is then exactly goal-pos, never an overshoot.
    const double denom = std::max(norm_inf, step_size);
    return {u[0] / denom, u[1] / denom};
}

RolloutResult rollout(const Policy& policy, const GridContext& ctx,
                      const GridState& start, std::size_t horizon,
                      double step_size, double success_radius) {
    require(horizon >= 1, "rollout: horizon >= 1");
    RolloutResult result;
    result.trajectory.context_id = ctx.context_id;
    GridState s = start;
    if (s.distance_to_goal() < success_radius) {
        result.success = true;
    }
    for (std::size_t t = 0; t < horizon; ++t) {
        const auto obs = s.obs();
        auto action = policy(obs);
        if (action.size() != 2 || !std::isfinite(action[0]) ||
            !std::isfinite(action[1])) {
            result.success = false;
            return result;
        }
        // Respect the dynamics precondition even for learned policies.
        const double n = std::max(std::fabs(action[0]), std::fabs(action[1]));
        if (n > 1.0) {
            action[0] /= n;
            action[1] /= n;
        }
        Sample step;
        step.obs = obs;
        step.act = action;
        step.t = static_cast<std::uint32_t>(t);
        result.trajectory.steps.push_back(std::move(step));
        s = grid_step(s, action, ctx, step_size);
        if (!result.success && s.distance_to_goal() < success_radius) {
            result.success = true;
            result.steps_to_success = t + 1;
        }
    }
    return result;
}

void WorldConfig::validate() const {
    require(kind == "grid" || kind == "fn1d", "WorldConfig: unknown kind");
    require(train_contexts >= 1, "WorldConfig: train_contexts >= 1");
    require(trajectories_per_context >= 1 && horizon >= 1,
            "WorldConfig: trajectory counts >= 1");
    require(samples_per_context >= 1, "WorldConfig: samples_per_context >= 1");
    require(coeff_range > 0.0 && coeff_range <= 3.0,
            "WorldConfig: coeff_range in (0, 3]");
    require(noise_scale >= 0.0, "WorldConfig: noise_scale >= 0");
}

namespace {

// Stratified context draws keep the angle coverage even; scales are uniform
// in [0.5, 2] so condition numbers stay small.
std::vector<GridContext> make_grid_contexts(std::size_t n, const std::string& prefix,
                                            Prng& rng) {
    std::vector<GridContext> out;
    for (std::size_t i = 0; i < n; ++i) {
        GridContext c;
        c.context_id = prefix + padded(i);
        const double lo = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        const double hi = 2.0 * kPi * static_cast<double>(i + 1) / static_cast<double>(n);
        c.theta = rng.uniform(lo, hi);
        c.scale = rng.uniform(0.5, 2.0);
        out.push_back(std::move(c));
    }
    return out;
}

// The linear term x has about 2.5x the mean magnitude of sin(3x)/cos(2x) on
// [-pi, pi], so d is drawn from a narrower range to keep the three
// generators comparably weighted in the L1 loss.
constexpr double kLinearTermScale = 0.4;

std::vector<FunctionContext1D> draw_fn1d_contexts(std::size_t n,
                                                  const std::string& prefix,
                                                  double range, Prng& rng) {
    std::vector<FunctionContext1D> out;
    for (std::size_t i = 0; i < n; ++i) {
        FunctionContext1D c;
        c.context_id = prefix + padded(i);
        c.a = rng.uniform(-range, range);
        c.b = rng.uniform(-range, range);
        c.d = rng.uniform(-kLinearTermScale * range, kLinearTermScale * range);
        out.push_back(std::move(c));
    }
    return out;
}

// A training set only teaches the basis directions it actually exercises:
// every generator needs at least one strong coefficient, and the normalized
// coefficient matrix must be well-spread (det of the second-moment matrix
// bounded below). Rejected draws are re-drawn from the same stream, which
// keeps generation deterministic.
bool fn1d_contexts_well_conditioned(const std::vector<FunctionContext1D>& ctxs,
                                    double range) {
    const std::size_t n = ctxs.size();
    if (n < 3) return true;
    double max_col[3] = {0.0, 0.0, 0.0};
    double moment[3][3] = {};
    for (const auto& c : ctxs) {
        const double row[3] = {c.a / range, c.b / range,
                               c.d / (kLinearTermScale * range)};
        for (int i = 0; i < 3; ++i) {
            max_col[i] = std::max(max_col[i], std::fabs(row[i]));
            for (int j = 0; j < 3; ++j) moment[i][j] += row[i] * row[j];
        }
    }
    for (auto& col : max_col) {
        if (col < 0.6) return false;
    }
    double m[3][3];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = moment[i][j] / static_cast<double>(n);
    }
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    // For iid U[-1,1] columns the expected second-moment matrix is I/3.
    return det >= 0.015;
}

std::vector<FunctionContext1D> make_fn1d_contexts(std::size_t n,
                                                  const std::string& prefix,
                                                  double range, Prng& rng,
                                                  bool conditioned) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        auto out = draw_fn1d_contexts(n, prefix, range, rng);
        if (!conditioned || fn1d_contexts_well_conditioned(out, range)) return out;
    }
    throw std::runtime_error("make_fn1d_contexts: rejection sampling stalled");
}

GridState random_episode(Prng& rng) {
    GridState s;
    for (;;) {
        s.px = rng.uniform(0.05, 0.95);
        s.py = rng.uniform(0.05, 0.95);
        s.gx = rng.uniform(0.05, 0.95);
        s.gy = rng.uniform(0.05, 0.95);
        if (s.distance_to_goal() >= 0.2) return s;  // informative episodes only
    }
}

ContextDataset grid_dataset(const GridContext& ctx, const WorldConfig& cfg,
                            Prng rng) {
    ContextDataset ds;
    ds.context_id = ctx.context_id;
    for (std::size_t traj = 0; traj < cfg.trajectories_per_context; ++traj) {
        GridState s = random_episode(rng);
        for (std::size_t t = 0; t < cfg.horizon; ++t) {
            Sample sample;
            sample.obs = s.obs();
            sample.act = grid_expert(s, ctx, cfg.step_size);
            sample.traj = static_cast<std::uint32_t>(traj);
            sample.t = static_cast<std::uint32_t>(t);
            s = grid_step(s, sample.act, ctx, cfg.step_size);
            ds.samples.push_back(std::move(sample));
        }
    }
    return ds;
}

ContextDataset fn1d_dataset(const FunctionContext1D& ctx, const WorldConfig& cfg,
                            Prng rng) {
    ContextDataset ds;
    ds.context_id = ctx.context_id;
    for (std::size_t j = 0; j < cfg.samples_per_context; ++j) {
        Sample sample;
        const double x = rng.uniform(-kPi, kPi);
        double y = expert_1d(ctx, x);
        if (cfg.noise_scale > 0.0) y += rng.laplace(cfg.noise_scale);
        sample.obs = {x};
        sample.act = {y};
        sample.traj = 0;
        sample.t = static_cast<std::uint32_t>(j);
        ds.samples.push_back(std::move(sample));
    }
    return ds;
}

}  // namespace

GeneratedData generate_dataset(const WorldConfig& cfg) {
    cfg.validate();
    GeneratedData out;
    out.config = cfg;

    Prng master(cfg.seed);
    Prng ctx_rng = master.derive(10);

    if (cfg.kind == "grid") {
        auto train_ctx = make_grid_contexts(cfg.train_contexts, "c-tr-", ctx_rng);
        auto ood_ctx = make_grid_contexts(cfg.holdout_contexts, "c-ood-", ctx_rng);
        std::size_t stream = 0;
        for (const auto& c : train_ctx) {
            out.train.push_back(grid_dataset(c, cfg, master.derive(100 + stream++)));
            out.grid_contexts.push_back(c);
        }
        for (const auto& c : ood_ctx) {
            out.holdout.push_back(grid_dataset(c, cfg, master.derive(100 + stream++)));
            out.grid_contexts.push_back(c);
        }
    } else {
        auto train_ctx = make_fn1d_contexts(cfg.train_contexts, "c-tr-",
                                            cfg.coeff_range, ctx_rng, true);
        auto ood_ctx = make_fn1d_contexts(cfg.holdout_contexts, "c-ood-",
                                          cfg.coeff_range, ctx_rng, false);
        std::size_t stream = 0;
        for (const auto& c : train_ctx) {
            out.train.push_back(fn1d_dataset(c, cfg, master.derive(100 + stream++)));
            out.fn1d_contexts.push_back(c);
        }
        for (const auto& c : ood_ctx) {
            out.holdout.push_back(fn1d_dataset(c, cfg, master.derive(100 + stream++)));
            out.fn1d_contexts.push_back(c);
        }
    }
    return out;
}

const ContextDataset* GeneratedData::find(const std::string& context_id) const {
    for (const auto& d : train) {
        if (d.context_id == context_id) return &d;
    }
    for (const auto& d : holdout) {
        if (d.context_id == context_id) return &d;
    }
    return nullptr;
}

const GridContext* GeneratedData::find_grid_context(
    const std::string& context_id) const {
    for (const auto& c : grid_contexts) {
        if (c.context_id == context_id) return &c;
    }
    return nullptr;
}

const FunctionContext1D* GeneratedData::find_fn1d_context(
    const std::string& context_id) const {
    for (const auto& c : fn1d_contexts) {
        if (c.context_id == context_id) return &c;
    }
    return nullptr;
}

bool GeneratedData::is_holdout(const std::string& context_id) const {
    for (const auto& d : holdout) {
        if (d.context_id == context_id) return true;
    }
    return false;
}

Trajectory expert_demo(const GridContext& ctx, std::size_t horizon,
                       double step_size, std::uint64_t seed) {
    Prng rng(seed);
    const GridState start = random_episode(rng);
    const auto expert = [&](std::span<const double> obs) {
        GridState s{obs[0], obs[1], obs[2], obs[3]};
        return grid_expert(s, ctx, step_size);
    };
    return rollout(expert, ctx, start, horizon, step_size).trajectory;
}

}  // namespace fenc::worlds
