#pragma once

// Full-spectrum symmetric eigendecomposition: Householder reduction to
// tridiagonal form followed by implicitly shifted QL iteration. The whole
// spectrum is required because mode selection needs the participation
// ratio of every eigenvector.
//
// Eigenvectors are stored mode-contiguous (row m of `vectors` is
// eigenvector m) so that the QL plane rotations and all later per-mode
// statistics run over unit-stride memory.

#include <cstddef>
#include <vector>

#include "qloc/hamiltonian.hpp"

namespace qloc {

struct EigenBasis {
    std::size_t dim = 0;
    std::vector<double> eigenvalues;  // ascending
    std::vector<double> vectors;      // dim x dim, row m = eigenvector m

    const double* vec(std::size_t m) const { return vectors.data() + m * dim; }
    double* vec(std::size_t m) { return vectors.data() + m * dim; }
};

inline constexpr std::size_t kDefaultEigenCap = 16384;

// Decomposes a dense symmetric matrix given in row-major order (consumed).
// Throws std::invalid_argument on non-finite entries or dim > cap,
// std::runtime_error if the QL iteration fails to converge.
EigenBasis eigendecompose_dense(std::vector<double> A, std::size_t dim,
                                std::size_t cap = kDefaultEigenCap);

EigenBasis eigendecompose(const Hamiltonian& H, std::size_t cap = kDefaultEigenCap);

// Writes "index,eigenvalue" lines.
void dump_eigenvalues_csv(const EigenBasis& basis, const std::string& path);

} // namespace qloc
