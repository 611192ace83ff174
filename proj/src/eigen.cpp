#include "qloc/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <cfloat>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qloc/kernels.hpp"

namespace qloc {

namespace {

// Householder reduction of the symmetric matrix A (row-major, consumed) to
// tridiagonal form (d, e). Both triangles of the active leading block are
// kept in sync so every inner product and rank-2 update runs over
// contiguous rows. Row i is left holding the (scaled) Householder vector
// of stage i; hs[i] holds that stage's h (0 means the stage was skipped).
void tridiagonalize(std::vector<double>& A, std::size_t n,
                    std::vector<double>& d, std::vector<double>& e,
                    std::vector<double>& hs) {
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    hs.assign(n, 0.0);
    std::vector<double> p(n), w(n);

    for (std::size_t i = n - 1; i >= 1; --i) {
        double* row_i = A.data() + i * n;
        const std::size_t l = i - 1;
        if (l == 0) {
            e[i] = row_i[0];
            if (i == 1) break;
            continue;
        }
        double scale = 0.0;
        for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(row_i[k]);
        if (scale == 0.0) {  // already reduced in this row
            e[i] = row_i[l];
            continue;
        }
        double h = 0.0;
        for (std::size_t k = 0; k <= l; ++k) {
            row_i[k] /= scale;
            h += row_i[k] * row_i[k];
        }
        const double f = row_i[l];
        const double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        row_i[l] = f - g;  // row i now holds the Householder vector u

        // p = A*u/h over the leading block, then w = p - (u.p / 2h) u
        const double inv_h = 1.0 / h;
        for (std::size_t j = 0; j <= l; ++j)
            p[j] = kern::dot(A.data() + j * n, row_i, i) * inv_h;
        const double K = kern::dot(p.data(), row_i, i) * (0.5 * inv_h);
        for (std::size_t j = 0; j <= l; ++j) w[j] = p[j] - K * row_i[j];

        // A <- A - u w^T - w u^T, one fused pass per row of the block
        for (std::size_t j = 0; j <= l; ++j)
            kern::axpy2(-row_i[j], w.data(), -w[j], row_i, A.data() + j * n, i);
        hs[i] = h;
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = A[i * n + i];
    e[0] = 0.0;
}

// Builds E = Q^T by right-multiplying the identity by the stage reflectors
// in ascending stage order. At stage i only rows 0..i-1 of E differ from
// the identity, so the update stays within the leading i x i block.
void accumulate_q_transpose(const std::vector<double>& A, std::size_t n,
                            const std::vector<double>& hs,
                            std::vector<double>& E) {
    E.assign(n * n, 0.0);
    for (std::size_t m = 0; m < n; ++m) E[m * n + m] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        if (hs[i] == 0.0) continue;
        const double* u = A.data() + i * n;  // length i
        const double beta = 1.0 / hs[i];
        for (std::size_t m = 0; m < i; ++m) {
            double* row = E.data() + m * n;
            const double y = kern::dot(row, u, i) * beta;
            if (y != 0.0) kern::axpy(-y, u, row, i);
        }
    }
}

// Implicitly shifted QL iteration with the plane rotations applied to the
// mode-contiguous eigenvector rows. d/e are the tridiagonal terms with
// e[0] unused on entry; on exit d holds eigenvalues and row m of E the
// matching eigenvector.
void ql_implicit(std::vector<double>& d, std::vector<double>& e,
                 std::vector<double>& E, std::size_t n) {
    constexpr int kMaxIter = 50;
    const double eps = DBL_EPSILON;

    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == kMaxIter)
                    throw std::runtime_error("eigendecompose: QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                std::size_t i = m;  // value used by the r==0 short-circuit test
                while (i-- > l) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {  // deflate without applying this rotation
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    kern::rot(E.data() + i * n, E.data() + (i + 1) * n, n, c, s);
                }
                if (r == 0.0 && i + 1 > l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

// Largest-magnitude entry positive, first such entry on ties.
void fix_signs(std::vector<double>& E, std::size_t n) {
    for (std::size_t m = 0; m < n; ++m) {
        double* row = E.data() + m * n;
        double best = 0.0;
        std::size_t at = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double a = std::fabs(row[k]);
            if (a > best) {
                best = a;
                at = k;
            }
        }
        if (row[at] < 0.0) kern::scale(row, n, -1.0);
    }
}

void sort_ascending(std::vector<double>& d, std::vector<double>& E, std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&d](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    // Apply the permutation to d and the rows of E by walking its cycles.
    std::vector<double> dv(n);
    for (std::size_t i = 0; i < n; ++i) dv[i] = d[order[i]];
    d.swap(dv);

    std::vector<double> row(n);
    std::vector<bool> seen(n, false);
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start] || order[start] == start) {
            seen[start] = true;
            continue;
        }
        std::copy_n(E.data() + start * n, n, row.data());
        std::size_t dst = start;
        while (!seen[dst]) {
            seen[dst] = true;
            const std::size_t src = order[dst];
            if (src == start) {
                std::copy_n(row.data(), n, E.data() + dst * n);
                break;
            }
            std::copy_n(E.data() + src * n, n, E.data() + dst * n);
            dst = src;
        }
    }
}

} // namespace

EigenBasis eigendecompose_dense(std::vector<double> A, std::size_t dim,
                                std::size_t cap) {
    if (dim == 0 || A.size() != dim * dim)
        throw std::invalid_argument("eigendecompose: bad matrix size");
    if (dim > cap)
        throw std::invalid_argument(
            "eigendecompose: dimension " + std::to_string(dim) + " over cap " +
            std::to_string(cap) + "; raise the cap or use a smaller image");
    for (double v : A)
        if (!std::isfinite(v))
            throw std::invalid_argument("eigendecompose: non-finite entries");

    EigenBasis basis;
    basis.dim = dim;
    if (dim == 1) {
        basis.eigenvalues = {A[0]};
        basis.vectors = {1.0};
        return basis;
    }

    std::vector<double> d, e, hs;
    tridiagonalize(A, dim, d, e, hs);
    accumulate_q_transpose(A, dim, hs, basis.vectors);
    ql_implicit(d, e, basis.vectors, dim);
    fix_signs(basis.vectors, dim);
    sort_ascending(d, basis.vectors, dim);
    basis.eigenvalues = std::move(d);
    return basis;
}

EigenBasis eigendecompose(const Hamiltonian& H, std::size_t cap) {
    if (H.dim > cap)
        throw std::invalid_argument(
            "eigendecompose: dimension " + std::to_string(H.dim) + " over cap " +
            std::to_string(cap) + "; raise the cap or use a smaller image");
    return eigendecompose_dense(densify(H), H.dim, cap);
}

void dump_eigenvalues_csv(const EigenBasis& basis, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "index,eigenvalue\n";
    out.precision(17);
    for (std::size_t i = 0; i < basis.dim; ++i)
        out << i << ',' << basis.eigenvalues[i] << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace qloc
