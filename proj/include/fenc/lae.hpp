#pragma once

// Exact least-absolute-error regression: given G (m x k) and y (m), find
// alpha minimizing sum_j |y_j - (G alpha)_j|. Solved as the linear program
//
//     min sum_j t_j   s.t.  -t_j <= y_j - (G alpha)_j <= t_j,  t >= 0
//
// by a primal simplex working on a condensed (m x k) tableau: the t_j split
// into residual parts p_j, q_j >= 0 whose columns are negatives of each
// other, so only one column per pair is stored. The default entering rule is
// Dantzig (most negative reduced cost); if the objective stalls, it switches
// permanently to Bland's rule, so termination is guaranteed either way. The
// objective is bounded below by zero, so the LP is never infeasible or
// unbounded.
//
// A least-squares baseline and a subset-enumeration oracle live here too.

#include <cstddef>
#include <string>
#include <vector>

#include "fenc/matrix.hpp"

namespace fenc::lae {

struct RegressionProblem {
    Matrix g;               // m x k basis evaluations
    std::vector<double> y;  // m targets

    std::size_t m() const { return g.rows(); }
    std::size_t k() const { return g.cols(); }
    void validate() const;
};

enum class SolveStatus { optimal, degenerate_optimal };

std::string status_name(SolveStatus s);

struct LaeSolution {
    std::vector<double> alpha;
    double objective = 0.0;  // sum_j |y_j - (G alpha)_j|
    SolveStatus status = SolveStatus::optimal;
    std::size_t iterations = 0;
};

enum class PivotRule { bland, dantzig };

LaeSolution solve_lae(const RegressionProblem& p,
                      PivotRule rule = PivotRule::dantzig);

struct LeastSquaresSolution {
    std::vector<double> alpha;
    bool jittered = false;  // normal equations needed the ridge jitter
};

// alpha = argmin ||y - G alpha||_2^2 via normal equations; rank-deficient
// problems get a diagonal jitter of 1e-10 * trace(G^T G)/k and are flagged.
LeastSquaresSolution solve_least_squares(const RegressionProblem& p);

struct BruteForceResult {
    double objective = 0.0;
    bool grid_fallback = false;  // every row subset was singular
};

// Independent oracle: enumerates all size-k row subsets, solves each
// interpolating system and returns the best L1 objective (an optimum of the
// LAE problem lies at such a vertex). Combinatorial; requires m <= 12, k <= 3.
BruteForceResult brute_force_lae(const RegressionProblem& p);

// Iteratively-reweighted least squares refinement. Approximate only; the
// simplex solver is the arbiter of correctness.
std::vector<double> irls_lae(const RegressionProblem& p, int iterations = 50,
                             double floor = 1e-8);

double l1_objective(const RegressionProblem& p, const std::vector<double>& alpha);

}  // namespace fenc::lae
