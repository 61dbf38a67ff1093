#pragma once

// Self-check suites behind the grad-check and solver-check subcommands:
// finite-difference verification across every network architecture in use,
// and the LAE solver against the subset-enumeration oracle.

#include <cstdint>
#include <string>
#include <vector>

namespace fenc::diagnostics {

struct GradCheckCase {
    std::string name;
    double max_rel_error = 0.0;
    double threshold = 1e-4;
    bool pass = false;
};

struct GradCheckReport {
    std::vector<GradCheckCase> cases;
    bool all_pass = false;
    double elapsed_s = 0.0;
};

// 20 seeded networks covering plain/tanh/relu/residual Mlps, fused and
// per-head basis networks, the monolithic baseline, and the full training
// loss with lambda = 1. Fixtures are re-seeded until every |residual| and
// every relu pre-activation is at least 1e-3 away from its kink, so central
// differences stay on one side of each |.| and relu corner.
GradCheckReport run_grad_check_sweep();

struct SolverCheckReport {
    std::size_t total = 0;
    std::size_t passed = 0;
    double max_gap = 0.0;
    double elapsed_s = 0.0;
    bool all_pass = false;
};

// Random problems with m <= 10, k <= 3, entries uniform in [-1, 1];
// solve_lae must match brute_force_lae within 1e-8 on every instance.
SolverCheckReport run_solver_check(std::size_t n_problems = 200,
                                   std::uint64_t seed = 20240901);

}  // namespace fenc::diagnostics
