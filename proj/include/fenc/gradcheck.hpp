#pragma once

// Finite-difference verification of analytic gradients.

#include <functional>
#include <span>
#include <vector>

#include "fenc/mlp.hpp"

namespace fenc {

// Scalar loss of a network output, with its gradient wrt that output.
struct ScalarLoss {
    std::function<double(std::span<const double>)> value;
    std::function<std::vector<double>(std::span<const double>)> grad;
};

// Max over all parameters of |analytic - central| / max(1, |central|), where
// central = (loss(p+h) - loss(p-h)) / 2h. `loss` must be a pure function of
// the parameters behind `params`; they are restored after each probe.
double central_difference_max_rel_error(
    std::span<std::span<double>> params,
    std::span<const std::span<const double>> analytic,
    const std::function<double()>& loss, double h);

// Checks the Mlp backward pass against central differences of loss(net(x)).
double grad_check(Mlp& net, const ScalarLoss& loss, std::span<const double> x,
                  double h);

// Same, but against externally supplied gradients (fault-injection hook).
double grad_check_against(Mlp& net, const ScalarLoss& loss,
                          std::span<const double> x, double h,
                          const MlpGrads& analytic);

}  // namespace fenc
