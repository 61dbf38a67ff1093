#pragma once

// Data-parallel inner-loop kernels used by the numeric layer: dot products,
// absolute-value reductions, axpy and the Adam parameter update.
//
// Every kernel has a scalar reference implementation and (on x86-64) an AVX2
// variant selected at runtime. Both paths evaluate reductions in the same
// fixed order -- four stride-4 partial sums combined as (s0+s2)+(s1+s3),
// tail elements appended sequentially -- and never use fused multiply-add,
// so scalar and AVX2 results are bit-identical.

#include <cstddef>
#include <string>

namespace fenc::kernels {

enum class Backend { scalar, avx2 };

// Currently selected backend. Auto-detected on first use; the environment
// variable FENC_KERNELS=scalar|avx2 overrides detection.
Backend active_backend();

// Forces a backend. Returns false (and leaves the selection unchanged) if
// the requested backend is not supported on this machine.
bool set_backend(Backend b);

bool avx2_supported();
std::string backend_name(Backend b);

// sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i |a[i]|
double sum_abs(const double* a, std::size_t n);

// sum_i |a[i]-b[i]|
double sum_abs_diff(const double* a, const double* b, std::size_t n);

// y[i] += s*x[i]
void axpy(double s, const double* x, double* y, std::size_t n);

// In-place Adam update on one parameter block.
//   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
//   p -= lr * (m/c1) / (sqrt(v/c2) + eps)
// c1, c2 are the bias-correction denominators 1-b1^t, 1-b2^t.
void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, double lr, double b1, double b2, double eps,
                 double c1, double c2);

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_abs_scalar(const double* a, std::size_t n);
double sum_abs_diff_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double s, const double* x, double* y, std::size_t n);
void adam_update_scalar(double* p, double* m, double* v, const double* g,
                        std::size_t n, double lr, double b1, double b2,
                        double eps, double c1, double c2);

#if defined(FENC_ENABLE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
double sum_abs_avx2(const double* a, std::size_t n);
double sum_abs_diff_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double s, const double* x, double* y, std::size_t n);
void adam_update_avx2(double* p, double* m, double* v, const double* g,
                      std::size_t n, double lr, double b1, double b2,
                      double eps, double c1, double c2);
#endif
}  // namespace detail

}  // namespace fenc::kernels
