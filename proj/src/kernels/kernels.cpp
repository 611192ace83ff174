#include "qloc/kernels.hpp"

namespace qloc::kern {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy2(double alpha, const double* x, double beta, const double* y,
           double* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += alpha * x[i] + beta * y[i];
}

void rot(double* a, double* b, std::size_t n, double c, double s) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ai = a[i];
        const double bi = b[i];
        a[i] = c * ai - s * bi;
        b[i] = s * ai + c * bi;
    }
}

void scale(double* x, std::size_t n, double alpha) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void sum2_sum4(const double* x, std::size_t n, double& s2, double& s4) {
    double a2 = 0.0, a4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = x[i] * x[i];
        a2 += q;
        a4 += q * q;
    }
    s2 = a2;
    s4 = a4;
}

} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
// Implemented in kernels_avx2.cpp (compiled with AVX2 flags).
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void axpy2(double alpha, const double* x, double beta, const double* y,
           double* dst, std::size_t n);
void rot(double* a, double* b, std::size_t n, double c, double s);
void scale(double* x, std::size_t n, double alpha);
void sum2_sum4(const double* x, std::size_t n, double& s2, double& s4);
} // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void axpy2(double alpha, const double* x, double beta, const double* y,
           double* dst, std::size_t n);
void rot(double* a, double* b, std::size_t n, double c, double s);
void scale(double* x, std::size_t n, double alpha);
void sum2_sum4(const double* x, std::size_t n, double& s2, double& s4);
} // namespace neon
#endif

namespace {

struct table {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*axpy2)(double, const double*, double, const double*, double*, std::size_t);
    void (*rot)(double*, double*, std::size_t, double, double);
    void (*scale)(double*, std::size_t, double);
    void (*sum2_sum4)(const double*, std::size_t, double&, double&);
    const char* name;
};

constexpr table scalar_table = {scalar::dot, scalar::axpy, scalar::axpy2,
                                scalar::rot, scalar::scale, scalar::sum2_sum4,
                                "scalar"};

table detect() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return {avx2::dot, avx2::axpy, avx2::axpy2,
                avx2::rot, avx2::scale, avx2::sum2_sum4, "avx2"};
#endif
#if defined(__aarch64__)
    return {neon::dot, neon::axpy, neon::axpy2,
            neon::rot, neon::scale, neon::sum2_sum4, "neon"};
#endif
    return scalar_table;
}

bool g_force_scalar = false;

const table& active() {
    static const table t = detect();
    return g_force_scalar ? scalar_table : t;
}

} // namespace

double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active().axpy(alpha, x, y, n);
}
void axpy2(double alpha, const double* x, double beta, const double* y,
           double* dst, std::size_t n) {
    active().axpy2(alpha, x, beta, y, dst, n);
}
void rot(double* a, double* b, std::size_t n, double c, double s) {
    active().rot(a, b, n, c, s);
}
void scale(double* x, std::size_t n, double alpha) {
    active().scale(x, n, alpha);
}
void sum2_sum4(const double* x, std::size_t n, double& s2, double& s4) {
    active().sum2_sum4(x, n, s2, s4);
}

const char* active_isa() { return active().name; }

void force_scalar(bool on) { g_force_scalar = on; }

} // namespace qloc::kern
