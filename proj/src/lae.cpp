#include "fenc/lae.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "fenc/kernels.hpp"

namespace fenc::lae {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kOptTol = 1e-9;    // reduced-cost optimality tolerance
constexpr double kPivotTol = 1e-10; // ratio-test pivot eligibility

// One variable of the LP. Alpha variables are free (stored as a +/- pair
// u_i, v_i sharing a column); residual variables come in pairs (p_j, q_j)
// whose columns are negatives of each other.
struct Label {
    enum class Kind { alpha, pair } kind;
    std::size_t index;
    bool neg;  // alpha: represents v_i; pair: represents q_j
};

// Fixed global ordering for Bland's rule.
std::size_t bland_index(const Label& l, std::size_t k) {
    const std::size_t base = l.kind == Label::Kind::alpha ? 2 * l.index
                                                          : 2 * k + 2 * l.index;
    return base + (l.neg ? 1 : 0);
}

struct Tableau {
    std::size_t m, k;
    std::vector<double> t;     // m x k, row-major
    std::vector<double> rhs;   // basic values, >= 0 on pair rows
    std::vector<double> rc;    // reduced costs of stored columns
    std::vector<Label> row_label;
    std::vector<Label> col_label;

    double& at(std::size_t r, std::size_t c) { return t[r * k + c]; }
    double at(std::size_t r, std::size_t c) const { return t[r * k + c]; }
};

// Reduced cost of the negated twin of stored column c.
double twin_rc(const Tableau& tb, std::size_t c) {
    return tb.col_label[c].kind == Label::Kind::pair ? 2.0 - tb.rc[c] : -tb.rc[c];
}

// Flips stored column c to represent its negated twin.
void negate_column(Tableau& tb, std::size_t c) {
    for (std::size_t r = 0; r < tb.m; ++r) tb.at(r, c) = -tb.at(r, c);
    tb.rc[c] = twin_rc(tb, c);
    tb.col_label[c].neg = !tb.col_label[c].neg;
}

void pivot(Tableau& tb, std::size_t l, std::size_t e) {
    const double piv = tb.at(l, e);
    const double inv = 1.0 / piv;

    // Pivot row.
    for (std::size_t j = 0; j < tb.k; ++j) tb.at(l, j) *= inv;
    tb.at(l, e) = inv;
    tb.rhs[l] *= inv;

    // Remaining rows.
    for (std::size_t r = 0; r < tb.m; ++r) {
        if (r == l) continue;
        const double f = tb.at(r, e);
        if (f == 0.0) continue;
        kernels::axpy(-f, &tb.t[l * tb.k], &tb.t[r * tb.k], tb.k);
        tb.at(r, e) = -f * inv;
        tb.rhs[r] -= f * tb.rhs[l];
    }

    // Reduced-cost row.
    const double f = tb.rc[e];
    if (f != 0.0) {
        kernels::axpy(-f, &tb.t[l * tb.k], tb.rc.data(), tb.k);
        tb.rc[e] = -f * inv;
    }

    std::swap(tb.row_label[l], tb.col_label[e]);
}

// Entering column under Bland's rule: smallest variable index among all
// eligible variables (stored columns and their negated twins). Returns the
// stored column index and whether the twin enters; npos when optimal.
std::size_t choose_entering_bland(const Tableau& tb, bool& enter_twin) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::size_t best_col = kNone;
    for (std::size_t c = 0; c < tb.k; ++c) {
        if (tb.rc[c] < -kOptTol) {
            const std::size_t idx = bland_index(tb.col_label[c], tb.k);
            if (idx < best) {
                best = idx;
                best_col = c;
                enter_twin = false;
            }
        }
        if (twin_rc(tb, c) < -kOptTol) {
            Label twin = tb.col_label[c];
            twin.neg = !twin.neg;
            const std::size_t idx = bland_index(twin, tb.k);
            if (idx < best) {
                best = idx;
                best_col = c;
                enter_twin = true;
            }
        }
    }
    return best_col;
}

std::size_t choose_entering_dantzig(const Tableau& tb, bool& enter_twin) {
    double best = -kOptTol;
    std::size_t best_col = kNone;
    for (std::size_t c = 0; c < tb.k; ++c) {
        if (tb.rc[c] < best) {
            best = tb.rc[c];
            best_col = c;
            enter_twin = false;
        }
        const double tw = twin_rc(tb, c);
        if (tw < best) {
            best = tw;
            best_col = c;
            enter_twin = true;
        }
    }
    return best_col;
}

// Leaving row: standard min-ratio test over pair-labeled rows (alpha rows
// are free and never block), ties broken by Bland index.
std::size_t choose_leaving(const Tableau& tb, std::size_t e) {
    double best_ratio = std::numeric_limits<double>::infinity();
    std::size_t best_row = kNone;
    std::size_t best_idx = std::numeric_limits<std::size_t>::max();
    for (std::size_t r = 0; r < tb.m; ++r) {
        if (tb.row_label[r].kind != Label::Kind::pair) continue;
        const double d = tb.at(r, e);
        if (d <= kPivotTol) continue;
        const double ratio = tb.rhs[r] / d;
        const std::size_t idx = bland_index(tb.row_label[r], tb.k);
        if (ratio < best_ratio - 1e-15 ||
            (ratio <= best_ratio + 1e-15 && idx < best_idx)) {
            best_ratio = ratio;
            best_row = r;
            best_idx = idx;
        }
    }
    return best_row;
}

// Solves the s x s interpolation system given by the basic alpha variables
// and the zero-residual rows to remove accumulated pivot drift. Exact at a
// simplex vertex; falls back to tableau values if the subsystem is singular.
bool polish(const RegressionProblem& p, const Tableau& tb,
            std::vector<double>& alpha) {
    std::vector<std::size_t> basic_alpha;
    for (std::size_t r = 0; r < tb.m; ++r) {
        if (tb.row_label[r].kind == Label::Kind::alpha) {
            basic_alpha.push_back(tb.row_label[r].index);
        }
    }
    std::vector<std::size_t> zero_rows;
    for (std::size_t c = 0; c < tb.k; ++c) {
        if (tb.col_label[c].kind == Label::Kind::pair) {
            zero_rows.push_back(tb.col_label[c].index);
        }
    }
    if (basic_alpha.size() != zero_rows.size()) return false;
    std::sort(basic_alpha.begin(), basic_alpha.end());
    std::sort(zero_rows.begin(), zero_rows.end());

    const std::size_t s = basic_alpha.size();
    Matrix sub(s, s);
    std::vector<double> rhs(s);
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            sub(i, j) = p.g(zero_rows[i], basic_alpha[j]);
        }
        rhs[i] = p.y[zero_rows[i]];
    }
    std::vector<double> sol;
    if (!solve_linear(std::move(sub), std::move(rhs), sol)) return false;

    std::fill(alpha.begin(), alpha.end(), 0.0);
    for (std::size_t j = 0; j < s; ++j) alpha[basic_alpha[j]] = sol[j];
    return true;
}

}  // namespace

void RegressionProblem::validate() const {
    require(g.rows() >= 1 && g.cols() >= 1, "RegressionProblem: empty");
    require(y.size() == g.rows(), "RegressionProblem: y length mismatch");
    if (!g.all_finite()) throw std::invalid_argument("RegressionProblem: non-finite G");
    for (double v : y) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("RegressionProblem: non-finite y");
        }
    }
}

std::string status_name(SolveStatus s) {
    return s == SolveStatus::optimal ? "optimal" : "degenerate-optimal";
}

double l1_objective(const RegressionProblem& p, const std::vector<double>& alpha) {
    require(alpha.size() == p.k(), "l1_objective: alpha length mismatch");
    std::vector<double> pred(p.m());
    matvec(p.g, alpha, pred);
    return kernels::sum_abs_diff(pred.data(), p.y.data(), p.m());
}

LaeSolution solve_lae(const RegressionProblem& p, PivotRule rule) {
    p.validate();
    const std::size_t m = p.m();
    const std::size_t k = p.k();

    Tableau tb;
    tb.m = m;
    tb.k = k;
    tb.t.resize(m * k);
    tb.rhs.resize(m);
    tb.rc.assign(k, 0.0);
    tb.row_label.reserve(m);
    tb.col_label.reserve(k);

    for (std::size_t j = 0; j < m; ++j) {
        const bool flip = p.y[j] < 0.0;
        const double s = flip ? -1.0 : 1.0;
        for (std::size_t i = 0; i < k; ++i) tb.at(j, i) = s * p.g(j, i);
        tb.rhs[j] = s * p.y[j];
        tb.row_label.push_back({Label::Kind::pair, j, flip});
    }
    for (std::size_t i = 0; i < k; ++i) {
        tb.col_label.push_back({Label::Kind::alpha, i, false});
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) sum += tb.at(j, i);
        tb.rc[i] = -sum;  // c_alpha = 0, all initial basic costs are 1
    }

    const std::size_t max_iters = 200 * (m + k) + 20000;
    std::size_t iters = 0;
    bool use_bland = (rule == PivotRule::bland);
    // Stall detection for the Dantzig rule.
    double last_obj = std::numeric_limits<double>::infinity();
    std::size_t stall = 0;
    const std::size_t stall_limit = 2 * (m + k) + 64;

    for (;; ++iters) {
        if (iters > max_iters) {
            throw std::runtime_error("solve_lae: iteration limit exceeded");
        }
        bool enter_twin = false;
        const std::size_t e = use_bland
                                  ? choose_entering_bland(tb, enter_twin)
                                  : choose_entering_dantzig(tb, enter_twin);
        if (e == kNone) break;  // optimal
        if (enter_twin) negate_column(tb, e);

        const std::size_t l = choose_leaving(tb, e);
        if (l == kNone) {
            // The objective is bounded below by zero, so an unbounded ray
            // can only come from numerical breakdown.
            throw std::runtime_error("solve_lae: ratio test failed");
        }
        pivot(tb, l, e);

        if (!use_bland) {
            double obj = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                if (tb.row_label[r].kind == Label::Kind::pair) obj += tb.rhs[r];
            }
            if (obj < last_obj - kOptTol) {
                last_obj = obj;
                stall = 0;
            } else if (++stall > stall_limit) {
                use_bland = true;  // anti-cycling fallback
            }
        }
    }

    LaeSolution sol;
    sol.iterations = iters;
    sol.alpha.assign(k, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        if (tb.row_label[r].kind == Label::Kind::alpha) {
            const double v = tb.row_label[r].neg ? -tb.rhs[r] : tb.rhs[r];
            sol.alpha[tb.row_label[r].index] = v;
        }
    }
    polish(p, tb, sol.alpha);
    sol.objective = l1_objective(p, sol.alpha);

    sol.status = SolveStatus::optimal;
    for (std::size_t c = 0; c < k; ++c) {
        const double lowest = std::min(tb.rc[c], twin_rc(tb, c));
        if (lowest <= kOptTol) {
            sol.status = SolveStatus::degenerate_optimal;
            break;
        }
    }
    return sol;
}

LeastSquaresSolution solve_least_squares(const RegressionProblem& p) {
    p.validate();
    const std::size_t k = p.k();
    Matrix gt = transpose(p.g);
    Matrix gtg = matmul(gt, p.g);
    std::vector<double> rhs(k);
    matvec(gt, p.y, rhs);

    LeastSquaresSolution out;
    if (solve_linear(gtg, rhs, out.alpha, 1e-12)) return out;

    double trace = 0.0;
    for (std::size_t i = 0; i < k; ++i) trace += gtg(i, i);
    double jitter = 1e-10 * trace / static_cast<double>(k);
    if (jitter <= 0.0) jitter = 1e-12;
    out.jittered = true;
    for (int attempt = 0; attempt < 20; ++attempt) {
        Matrix a = gtg;
        for (std::size_t i = 0; i < k; ++i) a(i, i) += jitter;
        if (solve_linear(std::move(a), rhs, out.alpha, 0.0)) return out;
        jitter *= 10.0;
    }
    throw std::runtime_error("solve_least_squares: normal equations unsolvable");
}

namespace {

void enumerate_subsets(std::size_t m, std::size_t k,
                       std::vector<std::size_t>& pick, std::size_t start,
                       const std::function<void(const std::vector<std::size_t>&)>& fn) {
    if (pick.size() == k) {
        fn(pick);
        return;
    }
    for (std::size_t i = start; i < m; ++i) {
        pick.push_back(i);
        enumerate_subsets(m, k, pick, i + 1, fn);
        pick.pop_back();
    }
}

}  // namespace

BruteForceResult brute_force_lae(const RegressionProblem& p) {
    p.validate();
    const std::size_t m = p.m();
    const std::size_t k = p.k();
    require(m <= 12 && k <= 3, "brute_force_lae: problem too large");
    require(m >= k, "brute_force_lae: fewer rows than columns");

    BruteForceResult result;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick;
    enumerate_subsets(m, k, pick, 0, [&](const std::vector<std::size_t>& rows) {
        Matrix sub(k, k);
        std::vector<double> rhs(k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) sub(i, j) = p.g(rows[i], j);
            rhs[i] = p.y[rows[i]];
        }
        std::vector<double> alpha;
        if (!solve_linear(std::move(sub), std::move(rhs), alpha, 1e-10)) return;
        best = std::min(best, l1_objective(p, alpha));
    });

    if (std::isfinite(best)) {
        result.objective = best;
        return result;
    }

    // Every subset singular (e.g. a zero column): coarse-to-fine grid search.
    result.grid_fallback = true;
    double ymax = 0.0;
    for (double v : p.y) ymax = std::max(ymax, std::fabs(v));
    double gmax = 0.0;
    for (double v : p.g.flat()) gmax = std::max(gmax, std::fabs(v));
    double radius = gmax > 0.0 ? 2.0 * ymax / gmax + 1.0 : 1.0;

    std::vector<double> center(k, 0.0);
    std::vector<double> alpha(k, 0.0);
    best = l1_objective(p, center);
    std::vector<double> best_alpha = center;
    for (int round = 0; round < 6; ++round) {
        const int grid = 10;
        std::vector<int> idx(k, -grid);
        for (;;) {
            for (std::size_t i = 0; i < k; ++i) {
                alpha[i] = center[i] + radius * idx[i] / grid;
            }
            const double obj = l1_objective(p, alpha);
            if (obj < best) {
                best = obj;
                best_alpha = alpha;
            }
            std::size_t d = 0;
            while (d < k && ++idx[d] > grid) idx[d++] = -grid;
            if (d == k) break;
        }
        center = best_alpha;
        radius /= grid;
    }
    result.objective = best;
    return result;
}

std::vector<double> irls_lae(const RegressionProblem& p, int iterations,
                             double floor) {
    p.validate();
    std::vector<double> alpha = solve_least_squares(p).alpha;
    const std::size_t m = p.m();
    const std::size_t k = p.k();
    std::vector<double> resid(m), wrow(k);
    for (int it = 0; it < iterations; ++it) {
        matvec(p.g, alpha, resid);
        for (std::size_t j = 0; j < m; ++j) resid[j] = p.y[j] - resid[j];
        Matrix a(k, k);
        std::vector<double> rhs(k, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            const double w = 1.0 / std::max(std::fabs(resid[j]), floor);
            for (std::size_t i = 0; i < k; ++i) wrow[i] = w * p.g(j, i);
            add_outer(a, wrow, std::span<const double>(p.g.row(j), k));
            kernels::axpy(w * p.y[j], p.g.row(j), rhs.data(), k);
        }
        for (std::size_t i = 0; i < k; ++i) a(i, i) += 1e-12;
        std::vector<double> next;
        if (!solve_linear(std::move(a), std::move(rhs), next)) break;
        alpha = std::move(next);
    }
    return alpha;
}

}  // namespace fenc::lae
