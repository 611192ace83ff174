// NEON variants of the vector kernels for aarch64. Baseline NEON is part
// of the aarch64 ABI, so no runtime probe is needed there; the dispatcher
// selects this table whenever the build targets aarch64.

#if defined(__aarch64__)

#include <arm_neon.h>
#include <cstddef>

namespace qloc::kern::neon {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    for (; i + 2 <= n; i += 2)
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpy2(double alpha, const double* x, double beta, const double* y,
           double* dst, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    const float64x2_t vb = vdupq_n_f64(beta);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vd = vld1q_f64(dst + i);
        vd = vfmaq_f64(vd, va, vld1q_f64(x + i));
        vd = vfmaq_f64(vd, vb, vld1q_f64(y + i));
        vst1q_f64(dst + i, vd);
    }
    for (; i < n; ++i) dst[i] += alpha * x[i] + beta * y[i];
}

void rot(double* a, double* b, std::size_t n, double c, double s) {
    const float64x2_t vc = vdupq_n_f64(c);
    const float64x2_t vs = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t va = vld1q_f64(a + i);
        const float64x2_t vb = vld1q_f64(b + i);
        vst1q_f64(a + i, vfmsq_f64(vmulq_f64(vc, va), vs, vb));
        vst1q_f64(b + i, vfmaq_f64(vmulq_f64(vc, vb), vs, va));
    }
    for (; i < n; ++i) {
        const double ai = a[i];
        const double bi = b[i];
        a[i] = c * ai - s * bi;
        b[i] = s * ai + c * bi;
    }
}

void scale(double* x, std::size_t n, double alpha) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

void sum2_sum4(const double* x, std::size_t n, double& s2, double& s4) {
    float64x2_t a2 = vdupq_n_f64(0.0);
    float64x2_t a4 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t v = vld1q_f64(x + i);
        const float64x2_t q = vmulq_f64(v, v);
        a2 = vaddq_f64(a2, q);
        a4 = vfmaq_f64(a4, q, q);
    }
    double r2 = vaddvq_f64(a2), r4 = vaddvq_f64(a4);
    for (; i < n; ++i) {
        const double q = x[i] * x[i];
        r2 += q;
        r4 += q * q;
    }
    s2 = r2;
    s4 = r4;
}

} // namespace qloc::kern::neon

#endif // aarch64
