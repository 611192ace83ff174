#pragma once

// Low-level vector kernels used by the eigensolver and mode statistics.
// Each kernel has a scalar reference implementation plus optional SIMD
// variants (AVX2 on x86-64, NEON on aarch64) selected once at runtime.
// The scalar versions stay publicly visible so tests can check the SIMD
// paths against them on the same inputs.

#include <cstddef>

namespace qloc::kern {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);

// dst += alpha * x + beta * y  (fused rank-2 row update)
void axpy2(double alpha, const double* x, double beta, const double* y,
           double* dst, std::size_t n);

// Plane rotation of two rows: a' = c*a - s*b, b' = s*a + c*b
void rot(double* a, double* b, std::size_t n, double c, double s);

// x *= alpha
void scale(double* x, std::size_t n, double alpha);

// s2 = sum x_i^2, s4 = sum x_i^4 in one pass (participation ratios)
void sum2_sum4(const double* x, std::size_t n, double& s2, double& s4);

} // namespace scalar

// Dispatched entry points. First call probes the CPU; subsequent calls go
// straight through a function table.
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void axpy2(double alpha, const double* x, double beta, const double* y,
           double* dst, std::size_t n);
void rot(double* a, double* b, std::size_t n, double c, double s);
void scale(double* x, std::size_t n, double alpha);
void sum2_sum4(const double* x, std::size_t n, double& s2, double& s4);

// Name of the instruction set behind the dispatched calls: "scalar",
// "avx2", or "neon".
const char* active_isa();

// Test hook: when on, dispatched calls use the scalar path regardless of
// CPU support. Not thread-safe by design (set once before heavy work).
void force_scalar(bool on);

} // namespace qloc::kern
