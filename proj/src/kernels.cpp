#include "fenc/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace fenc::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double s = (s0 + s2) + (s1 + s3);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum_abs_scalar(const double* a, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += std::fabs(a[i]);
        s1 += std::fabs(a[i + 1]);
        s2 += std::fabs(a[i + 2]);
        s3 += std::fabs(a[i + 3]);
    }
    double s = (s0 + s2) + (s1 + s3);
    for (; i < n; ++i) s += std::fabs(a[i]);
    return s;
}

double sum_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += std::fabs(a[i] - b[i]);
        s1 += std::fabs(a[i + 1] - b[i + 1]);
        s2 += std::fabs(a[i + 2] - b[i + 2]);
        s3 += std::fabs(a[i + 3] - b[i + 3]);
    }
    double s = (s0 + s2) + (s1 + s3);
    for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
    return s;
}

void axpy_scalar(double s, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + s * x[i];
}

void adam_update_scalar(double* p, double* m, double* v, const double* g,
                        std::size_t n, double lr, double b1, double b2,
                        double eps, double c1, double c2) {
    const double omb1 = 1.0 - b1;
    const double omb2 = 1.0 - b2;
    for (std::size_t i = 0; i < n; ++i) {
        const double gi = g[i];
        const double mi = b1 * m[i] + omb1 * gi;
        const double vi = b2 * v[i] + omb2 * (gi * gi);
        m[i] = mi;
        v[i] = vi;
        p[i] = p[i] - lr * ((mi / c1) / (std::sqrt(vi / c2) + eps));
    }
}

}  // namespace detail

namespace {

struct Vtable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum_abs)(const double*, std::size_t);
    double (*sum_abs_diff)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*adam)(double*, double*, double*, const double*, std::size_t, double,
                 double, double, double, double, double);
};

constexpr Vtable kScalar{detail::dot_scalar, detail::sum_abs_scalar,
                         detail::sum_abs_diff_scalar, detail::axpy_scalar,
                         detail::adam_update_scalar};

#if defined(FENC_ENABLE_AVX2)
constexpr Vtable kAvx2{detail::dot_avx2, detail::sum_abs_avx2,
                       detail::sum_abs_diff_avx2, detail::axpy_avx2,
                       detail::adam_update_avx2};
#endif

Backend g_backend = Backend::scalar;
const Vtable* g_vtable = nullptr;

bool cpu_has_avx2() {
#if defined(FENC_ENABLE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

void apply(Backend b) {
    g_backend = b;
#if defined(FENC_ENABLE_AVX2)
    g_vtable = (b == Backend::avx2) ? &kAvx2 : &kScalar;
#else
    g_vtable = &kScalar;
#endif
}

const Vtable& table() {
    if (g_vtable == nullptr) {
        Backend b = cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
        if (const char* env = std::getenv("FENC_KERNELS")) {
            if (std::strcmp(env, "scalar") == 0) b = Backend::scalar;
            if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) b = Backend::avx2;
        }
        apply(b);
    }
    return *g_vtable;
}

}  // namespace

Backend active_backend() {
    table();
    return g_backend;
}

bool set_backend(Backend b) {
    if (b == Backend::avx2 && !cpu_has_avx2()) return false;
    apply(b);
    return true;
}

bool avx2_supported() { return cpu_has_avx2(); }

std::string backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

double dot(const double* a, const double* b, std::size_t n) {
    return table().dot(a, b, n);
}

double sum_abs(const double* a, std::size_t n) { return table().sum_abs(a, n); }

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
    return table().sum_abs_diff(a, b, n);
}

void axpy(double s, const double* x, double* y, std::size_t n) {
    table().axpy(s, x, y, n);
}

void adam_update(double* p, double* m, double* v, const double* g,
                 std::size_t n, double lr, double b1, double b2, double eps,
                 double c1, double c2) {
    table().adam(p, m, v, g, n, lr, b1, b2, eps, c1, c2);
}

}  // namespace fenc::kernels
