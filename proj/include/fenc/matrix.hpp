#pragma once

// Dense row-major double matrix plus the few linear-algebra routines the
// rest of the code needs. Small and deterministic; not a BLAS.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fenc {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    std::span<double> flat() { return data_; }
    std::span<const double> flat() const { return data_; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const;

    bool operator==(const Matrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// y = M x  (len(x) == cols, len(y) == rows)
void matvec(const Matrix& m, std::span<const double> x, std::span<double> y);

// y = M^T x  (len(x) == rows, len(y) == cols); accumulated row-wise.
void matvec_transposed(const Matrix& m, std::span<const double> x,
                       std::span<double> y);

// M += outer(u, v), u indexes rows, v indexes columns.
void add_outer(Matrix& m, std::span<const double> u, std::span<const double> v);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

// Solves A x = b with partial-pivot LU. Returns false if A is singular
// (pivot below tol * max|A|); x is unspecified in that case.
bool solve_linear(Matrix a, std::vector<double> b, std::vector<double>& x,
                  double tol = 1e-12);

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace fenc
