#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qloc/hamiltonian.hpp"

using namespace qloc;

namespace {

ImageGrid two_by_two() {
    ImageGrid img(2);
    img.at(0, 0) = 1.0;
    img.at(0, 1) = 0.5;
    img.at(1, 0) = 0.25;
    img.at(1, 1) = 0.0;
    return img;
}

} // namespace

TEST_CASE("hbar of a constant image is exactly 2") {
    // x_i/max = 1 for every pixel, so the sum is N^2 and hbar = 2*N/N.
    for (int n : {2, 5, 16}) {
        ImageGrid img(n, 0.7);
        CHECK(estimate_hbar(img) == doctest::Approx(2.0).epsilon(1e-15));
    }
}

TEST_CASE("hbar hand value for the 2x2 ramp") {
    // (1, 0.5, 0.25, 0)/max=1 -> sum of squares 1.3125,
    // hbar = 2*sqrt(1.3125)/2 = sqrt(1.3125)
    CHECK(estimate_hbar(two_by_two()) == doctest::Approx(std::sqrt(1.3125)).epsilon(1e-15));
}

TEST_CASE("hbar ignores uniform intensity scaling") {
    ImageGrid a = two_by_two();
    ImageGrid b = a;
    for (double& v : b.pix) v *= 0.125;
    CHECK(estimate_hbar(a) == doctest::Approx(estimate_hbar(b)).epsilon(1e-14));
}

TEST_CASE("all-zero image is rejected") {
    ImageGrid z(4, 0.0);
    CHECK_THROWS(estimate_hbar(z));
}

TEST_CASE("coupling follows (alpha*hbar)^2 / (2m)") {
    PlanckParams p;
    p.hbar = 0.5;
    p.alpha = 4.0;
    p.mass = 2.0;
    CHECK(p.coupling() == doctest::Approx(4.0 / 4.0).epsilon(1e-15));
    p.alpha = 1.0;
    p.mass = 1.0;
    CHECK(p.coupling() == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("dense 2x2-image hamiltonian, literal mode, by hand") {
    const ImageGrid img = two_by_two();
    PlanckParams p;
    p.hbar = estimate_hbar(img);
    const double t = p.coupling();  // hbar^2/2 = 1.3125/2
    CHECK(t == doctest::Approx(0.65625).epsilon(1e-15));

    const Hamiltonian H = build_hamiltonian(img, p, LaplacianMode::literal);
    const std::vector<double> A = densify(H);
    REQUIRE(A.size() == 16);

    // diagonal: x + 4t
    CHECK(A[0 * 4 + 0] == doctest::Approx(1.0 + 4 * t));
    CHECK(A[1 * 4 + 1] == doctest::Approx(0.5 + 4 * t));
    CHECK(A[2 * 4 + 2] == doctest::Approx(0.25 + 4 * t));
    CHECK(A[3 * 4 + 3] == doctest::Approx(0.0 + 4 * t));
    // offset-1 band: pairs (0,1), (1,2), (2,3); (1,2) is the row wrap
    CHECK(A[0 * 4 + 1] == doctest::Approx(-t));
    CHECK(A[1 * 4 + 2] == doctest::Approx(-t));
    CHECK(A[2 * 4 + 3] == doctest::Approx(-t));
    // offset-N band: pairs (0,2), (1,3)
    CHECK(A[0 * 4 + 2] == doctest::Approx(-t));
    CHECK(A[1 * 4 + 3] == doctest::Approx(-t));
    // zero elsewhere, symmetric everywhere
    CHECK(A[0 * 4 + 3] == 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(A[i * 4 + j] == doctest::Approx(A[j * 4 + i]));
}

TEST_CASE("no_row_wrap drops exactly the end-of-row pairs") {
    const ImageGrid img = two_by_two();
    PlanckParams p;
    p.hbar = estimate_hbar(img);
    const double t = p.coupling();

    const Hamiltonian H = build_hamiltonian(img, p, LaplacianMode::no_row_wrap);
    const std::vector<double> A = densify(H);
    CHECK(A[0 * 4 + 1] == doctest::Approx(-t));  // in-row pair survives
    CHECK(A[1 * 4 + 2] == 0.0);                  // wrap pair removed
    CHECK(A[2 * 4 + 3] == doctest::Approx(-t));
    CHECK(A[0 * 4 + 2] == doctest::Approx(-t));  // vertical band untouched
    CHECK(A[1 * 4 + 3] == doctest::Approx(-t));
    // diagonal unchanged between modes
    CHECK(A[0] == doctest::Approx(1.0 + 4 * t));
}

TEST_CASE("alpha rescales the off-diagonal by alpha^2") {
    const ImageGrid img = two_by_two();
    PlanckParams p1;
    p1.hbar = estimate_hbar(img);
    PlanckParams p2 = p1;
    p2.alpha = 2.0;
    const Hamiltonian h1 = build_hamiltonian(img, p1);
    const Hamiltonian h2 = build_hamiltonian(img, p2);
    CHECK(h2.t == doctest::Approx(4.0 * h1.t).epsilon(1e-14));
}

TEST_CASE("construction is deterministic") {
    const ImageGrid img = two_by_two();
    PlanckParams p;
    p.hbar = estimate_hbar(img);
    const std::vector<double> a = densify(build_hamiltonian(img, p));
    const std::vector<double> b = densify(build_hamiltonian(img, p));
    CHECK(a == b);
}

TEST_CASE("triplet csv lists every stored entry with the header") {
    const ImageGrid img = two_by_two();
    PlanckParams p;
    p.hbar = estimate_hbar(img);
    const Hamiltonian H = build_hamiltonian(img, p);
    const char* path = "ham_test_dump.csv";
    dump_hamiltonian_csv(H, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "row,col,value");
    int lines = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++lines;
    // 4 diagonal + 2*(3 offset-1 + 2 offset-N) symmetric entries
    CHECK(lines == 14);
    in.close();
    std::remove(path);
}
