#include "fenc/adam.hpp"

#include <cmath>

#include "fenc/kernels.hpp"
#include "fenc/matrix.hpp"

namespace fenc {

AdamState AdamState::create(std::span<const std::span<double>> params, double lr) {
    AdamState s;
    s.lr = lr;
    for (const auto& block : params) {
        s.m.emplace_back(block.size(), 0.0);
        s.v.emplace_back(block.size(), 0.0);
    }
    return s;
}

double adam_effective_lr(const AdamState& opt, std::uint64_t warmup_steps) {
    if (warmup_steps == 0) return opt.lr;
    const double ramp = static_cast<double>(opt.t + 1) / static_cast<double>(warmup_steps);
    return opt.lr * std::min(1.0, ramp);
}

bool adam_step(std::span<std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& opt,
               std::uint64_t warmup_steps) {
    require(params.size() == grads.size() && params.size() == opt.m.size(),
            "adam_step: block count mismatch");
    for (std::size_t b = 0; b < params.size(); ++b) {
        require(params[b].size() == grads[b].size() &&
                    params[b].size() == opt.m[b].size(),
                "adam_step: block shape mismatch");
        for (double g : grads[b]) {
            if (!std::isfinite(g)) return false;
        }
    }

    const double lr_eff = adam_effective_lr(opt, warmup_steps);
    opt.t += 1;
    const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.t));
    const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.t));
    for (std::size_t b = 0; b < params.size(); ++b) {
        kernels::adam_update(params[b].data(), opt.m[b].data(), opt.v[b].data(),
                             grads[b].data(), params[b].size(), lr_eff,
                             opt.beta1, opt.beta2, opt.eps, c1, c2);
    }
    return true;
}

}  // namespace fenc
