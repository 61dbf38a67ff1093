// AVX2 kernel variants. Compiled with -mavx2 in this translation unit only;
// callers reach these through the runtime dispatch in kernels.cpp.
//
// Reduction order matches the scalar reference exactly: lane i of the
// accumulator holds elements with index == i (mod 4), the horizontal sum is
// (l0+l2)+(l1+l3), and tail elements are added sequentially. Multiplies and
// adds stay separate (no FMA), so results are bit-identical to scalar.

#include "fenc/kernels.hpp"

#if defined(FENC_ENABLE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace fenc::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d pair = _mm_add_pd(lo, hi);  // (l0+l2, l1+l3)
    return _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
}

inline __m256d abs_pd(__m256d v) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(v, mask);
}

}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                               _mm256_loadu_pd(b + i)));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_abs_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(a + i)));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += std::fabs(a[i]);
    return s;
}

double sum_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, abs_pd(d));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
    return s;
}

void axpy_avx2(double s, const double* x, double* y, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d prod = _mm256_mul_pd(vs, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] = y[i] + s * x[i];
}

void adam_update_avx2(double* p, double* m, double* v, const double* g,
                      std::size_t n, double lr, double b1, double b2,
                      double eps, double c1, double c2) {
    const __m256d vb1 = _mm256_set1_pd(b1);
    const __m256d vb2 = _mm256_set1_pd(b2);
    const __m256d vomb1 = _mm256_set1_pd(1.0 - b1);
    const __m256d vomb2 = _mm256_set1_pd(1.0 - b2);
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d vc1 = _mm256_set1_pd(c1);
    const __m256d vc2 = _mm256_set1_pd(c2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d gi = _mm256_loadu_pd(g + i);
        __m256d mi = _mm256_add_pd(_mm256_mul_pd(vb1, _mm256_loadu_pd(m + i)),
                                   _mm256_mul_pd(vomb1, gi));
        __m256d vi = _mm256_add_pd(_mm256_mul_pd(vb2, _mm256_loadu_pd(v + i)),
                                   _mm256_mul_pd(vomb2, _mm256_mul_pd(gi, gi)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(_mm256_div_pd(vi, vc2)), veps);
        __m256d step = _mm256_mul_pd(vlr, _mm256_div_pd(_mm256_div_pd(mi, vc1), denom));
        _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
    }
    const double omb1 = 1.0 - b1;
    const double omb2 = 1.0 - b2;
    for (; i < n; ++i) {
        const double gi = g[i];
        const double mi = b1 * m[i] + omb1 * gi;
        const double vi = b2 * v[i] + omb2 * (gi * gi);
        m[i] = mi;
        v[i] = vi;
        p[i] = p[i] - lr * ((mi / c1) / (std::sqrt(vi / c2) + eps));
    }
}

}  // namespace fenc::kernels::detail

#endif  // FENC_ENABLE_AVX2
