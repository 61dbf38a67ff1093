#include "fenc/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace fenc {

double central_difference_max_rel_error(
    std::span<std::span<double>> params,
    std::span<const std::span<const double>> analytic,
    const std::function<double()>& loss, double h) {
    require(h > 0.0 && h <= 1e-2, "grad_check: h must be in (0, 1e-2]");
    require(params.size() == analytic.size(), "grad_check: block count mismatch");

    double max_rel = 0.0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        require(params[b].size() == analytic[b].size(),
                "grad_check: block shape mismatch");
        for (std::size_t i = 0; i < params[b].size(); ++i) {
            double& p = params[b][i];
            const double saved = p;
            p = saved + h;
            const double lp = loss();
            p = saved - h;
            const double lm = loss();
            p = saved;
            if (!std::isfinite(lp) || !std::isfinite(lm)) {
                throw std::runtime_error("grad_check: non-finite loss");
            }
            const double central = (lp - lm) / (2.0 * h);
            const double rel = std::fabs(analytic[b][i] - central) /
                               std::max(1.0, std::fabs(central));
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

double grad_check_against(Mlp& net, const ScalarLoss& loss,
                          std::span<const double> x, double h,
                          const MlpGrads& analytic) {
    auto params = net.param_blocks();
    auto blocks = grad_blocks(analytic);
    auto eval = [&]() { return loss.value(net.forward(x)); };
    return central_difference_max_rel_error(params, blocks, eval, h);
}

double grad_check(Mlp& net, const ScalarLoss& loss, std::span<const double> x,
                  double h) {
    Mlp::Tape tape;
    const auto y = net.forward(x, &tape);
    MlpGrads grads = net.zero_grads();
    net.backward(tape, loss.grad(y), grads);
    return grad_check_against(net, loss, x, h, grads);
}

}  // namespace fenc
