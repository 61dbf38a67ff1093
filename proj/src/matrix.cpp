#include "fenc/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "fenc/kernels.hpp"

namespace fenc {

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void matvec(const Matrix& m, std::span<const double> x, std::span<double> y) {
    require(x.size() == m.cols() && y.size() == m.rows(), "matvec: shape mismatch");
    for (std::size_t r = 0; r < m.rows(); ++r) {
        y[r] = kernels::dot(m.row(r), x.data(), m.cols());
    }
}

void matvec_transposed(const Matrix& m, std::span<const double> x,
                       std::span<double> y) {
    require(x.size() == m.rows() && y.size() == m.cols(),
            "matvec_transposed: shape mismatch");
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        kernels::axpy(x[r], m.row(r), y.data(), m.cols());
    }
}

void add_outer(Matrix& m, std::span<const double> u, std::span<const double> v) {
    require(u.size() == m.rows() && v.size() == m.cols(), "add_outer: shape mismatch");
    for (std::size_t r = 0; r < m.rows(); ++r) {
        kernels::axpy(u[r], v.data(), m.row(r), m.cols());
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "matmul: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            kernels::axpy(a(i, k), b.row(k), c.row(i), b.cols());
        }
    }
    return c;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
    }
    return t;
}

bool solve_linear(Matrix a, std::vector<double> b, std::vector<double>& x,
                  double tol) {
    require(a.rows() == a.cols() && b.size() == a.rows(), "solve_linear: shape");
    const std::size_t n = a.rows();
    double amax = 0.0;
    for (double v : a.flat()) amax = std::max(amax, std::fabs(v));
    if (amax == 0.0) return false;

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::fabs(a(perm[col], col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::fabs(a(perm[r], col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best <= tol * amax) return false;
        std::swap(perm[col], perm[pivot]);
        const double inv = 1.0 / a(perm[col], col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(perm[r], col) * inv;
            if (f == 0.0) continue;
            a(perm[r], col) = 0.0;
            for (std::size_t c = col + 1; c < n; ++c) {
                a(perm[r], c) -= f * a(perm[col], c);
            }
            b[perm[r]] -= f * b[perm[col]];
        }
    }

    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[perm[i]];
        for (std::size_t c = i + 1; c < n; ++c) s -= a(perm[i], c) * x[c];
        x[i] = s / a(perm[i], i);
    }
    return true;
}

}  // namespace fenc
