#include "qloc/hamiltonian.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace qloc {

double estimate_hbar(const ImageGrid& img) {
    double mx = 0.0;
    for (double v : img.pix)
        if (v > mx) mx = v;
    if (mx <= 0.0)
        throw std::invalid_argument("estimate_hbar: all-zero image");
    double s = 0.0;
    for (double v : img.pix) {
        const double r = v / mx;
        s += r * r;
    }
    return 2.0 * std::sqrt(s) / img.n;
}

Hamiltonian build_hamiltonian(const ImageGrid& img, const PlanckParams& params,
                              LaplacianMode mode) {
    if (!(params.hbar > 0.0) || !(params.alpha > 0.0) || !(params.mass > 0.0))
        throw std::invalid_argument("build_hamiltonian: hbar, alpha, mass must be positive");
    Hamiltonian H;
    H.n = img.n;
    H.dim = img.size();
    H.t = params.coupling();
    H.mode = mode;
    H.diagonal.resize(H.dim);
    for (std::size_t i = 0; i < H.dim; ++i)
        H.diagonal[i] = img.pix[i] + 4.0 * H.t;
    return H;
}

std::vector<double> densify(const Hamiltonian& H) {
    const std::size_t n = H.dim;
    std::vector<double> A(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        A[i * n + i] = H.diagonal[i];
        if (H.horizontal_pair(i)) {
            A[i * n + i + 1] = -H.t;
            A[(i + 1) * n + i] = -H.t;
        }
        const std::size_t j = i + H.n;
        if (j < n) {
            A[i * n + j] = -H.t;
            A[j * n + i] = -H.t;
        }
    }
    return A;
}

void dump_hamiltonian_csv(const Hamiltonian& H, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "row,col,value\n";
    out.precision(17);
    for (std::size_t i = 0; i < H.dim; ++i) {
        out << i << ',' << i << ',' << H.diagonal[i] << '\n';
        if (H.horizontal_pair(i)) {
            out << i << ',' << i + 1 << ',' << -H.t << '\n';
            out << i + 1 << ',' << i << ',' << -H.t << '\n';
        }
        const std::size_t j = i + H.n;
        if (j < H.dim) {
            out << i << ',' << j << ',' << -H.t << '\n';
            out << j << ',' << i << ',' << -H.t << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace qloc
