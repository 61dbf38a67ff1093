#pragma once

// Adam with linear learning-rate warmup: effective lr at (0-based) step t is
// lr * min(1, (t+1)/warmup_steps). Bias correction is the textbook one.

#include <cstdint>
#include <span>
#include <vector>

namespace fenc {

struct AdamState {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t t = 0;
    std::vector<std::vector<double>> m;  // one entry per parameter block
    std::vector<std::vector<double>> v;

    static AdamState create(std::span<const std::span<double>> params, double lr);
};

// One Adam step over matching parameter/gradient blocks. Returns false and
// leaves everything untouched (including t) if any gradient is non-finite.
bool adam_step(std::span<std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& opt,
               std::uint64_t warmup_steps);

double adam_effective_lr(const AdamState& opt, std::uint64_t warmup_steps);

}  // namespace fenc
