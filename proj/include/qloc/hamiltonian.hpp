#pragma once

// Planck-constant estimation and construction of the image Hamiltonian:
// a sparse symmetric operator with the (smoothed) image as its diagonal
// potential and a nearest-neighbor kinetic coupling t on two symmetric
// off-diagonal bands (offsets 1 and N of the row-major vectorization).

#include <cstddef>
#include <string>
#include <vector>

#include "qloc/image.hpp"

namespace qloc {

// The stated operator couples index pairs (i, i+1) unconditionally, which
// joins the last pixel of each row to the first pixel of the next row.
// `literal` keeps those pairs; `no_row_wrap` zeroes them so the band is a
// true 2D horizontal-neighbor relation.
enum class LaplacianMode { literal, no_row_wrap };

struct PlanckParams {
    double hbar = 0.0;   // estimated from the image
    double alpha = 1.0;  // sweep scale, effective constant is alpha*hbar
    double mass = 1.0;

    double coupling() const {
        const double ah = alpha * hbar;
        return ah * ah / (2.0 * mass);
    }
};

struct Hamiltonian {
    int n = 0;                     // image side; dim = n*n
    std::size_t dim = 0;
    std::vector<double> diagonal;  // x(i) + 4t
    double t = 0.0;                // off-diagonal coupling magnitude
    LaplacianMode mode = LaplacianMode::literal;

    // True when the (i, i+1) band entry exists for this i.
    bool horizontal_pair(std::size_t i) const {
        if (i + 1 >= dim) return false;
        return mode == LaplacianMode::literal || (i % n) != static_cast<std::size_t>(n) - 1;
    }
};

// 2*sqrt(sum_i (x_i/max(x))^2)/N over all N^2 pixels. Throws
// std::invalid_argument for an all-zero image.
double estimate_hbar(const ImageGrid& img);

Hamiltonian build_hamiltonian(const ImageGrid& img, const PlanckParams& params,
                              LaplacianMode mode = LaplacianMode::literal);

// Dense row-major dim x dim copy (eigensolver input and debugging).
std::vector<double> densify(const Hamiltonian& H);

// Sparse triplet dump, one "row,col,value" line per stored entry.
void dump_hamiltonian_csv(const Hamiltonian& H, const std::string& path);

} // namespace qloc
