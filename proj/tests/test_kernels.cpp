#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "qloc/kernels.hpp"

using namespace qloc;

namespace {

// Deterministic fill with values in roughly [-1, 1] so sums stay tame.
std::vector<double> fill(std::size_t n, std::uint64_t seed) {
    std::vector<double> v(n);
    std::uint64_t s = seed;
    for (std::size_t i = 0; i < n; ++i) {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        v[i] = static_cast<double>(static_cast<std::int64_t>(s >> 11)) * 0x1.0p-52;
    }
    return v;
}

// Sizes chosen to hit the empty case, scalar remainders, and long vectors.
const std::size_t kSizes[] = {0, 1, 3, 4, 7, 8, 17, 64, 129, 1000};

} // namespace

TEST_CASE("scalar dot matches a plain loop") {
    for (std::size_t n : kSizes) {
        auto a = fill(n, 1), b = fill(n, 2);
        double want = 0.0;
        for (std::size_t i = 0; i < n; ++i) want += a[i] * b[i];
        CHECK(kern::scalar::dot(a.data(), b.data(), n) == doctest::Approx(want).epsilon(1e-15));
    }
}

TEST_CASE("dispatched kernels agree with scalar reference") {
    for (std::size_t n : kSizes) {
        auto a = fill(n, 3), b = fill(n, 4);

        const double d_ref = kern::scalar::dot(a.data(), b.data(), n);
        const double d_fast = kern::dot(a.data(), b.data(), n);
        CHECK(d_fast == doctest::Approx(d_ref).epsilon(1e-12));

        auto y_ref = fill(n, 5), y_fast = y_ref;
        kern::scalar::axpy(0.37, a.data(), y_ref.data(), n);
        kern::axpy(0.37, a.data(), y_fast.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(y_fast[i] == doctest::Approx(y_ref[i]).epsilon(1e-12));

        auto d2_ref = fill(n, 6), d2_fast = d2_ref;
        kern::scalar::axpy2(-1.25, a.data(), 0.8, b.data(), d2_ref.data(), n);
        kern::axpy2(-1.25, a.data(), 0.8, b.data(), d2_fast.data(), n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(d2_fast[i] == doctest::Approx(d2_ref[i]).epsilon(1e-12));

        auto r1_ref = fill(n, 7), r2_ref = fill(n, 8);
        auto r1_fast = r1_ref, r2_fast = r2_ref;
        const double c = std::cos(0.7), s = std::sin(0.7);
        kern::scalar::rot(r1_ref.data(), r2_ref.data(), n, c, s);
        kern::rot(r1_fast.data(), r2_fast.data(), n, c, s);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(r1_fast[i] == doctest::Approx(r1_ref[i]).epsilon(1e-12));
            CHECK(r2_fast[i] == doctest::Approx(r2_ref[i]).epsilon(1e-12));
        }

        auto x_ref = fill(n, 9), x_fast = x_ref;
        kern::scalar::scale(x_ref.data(), n, -2.5);
        kern::scale(x_fast.data(), n, -2.5);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(x_fast[i] == doctest::Approx(x_ref[i]).epsilon(1e-12));

        double s2r = 0, s4r = 0, s2f = 0, s4f = 0;
        kern::scalar::sum2_sum4(a.data(), n, s2r, s4r);
        kern::sum2_sum4(a.data(), n, s2f, s4f);
        CHECK(s2f == doctest::Approx(s2r).epsilon(1e-12));
        CHECK(s4f == doctest::Approx(s4r).epsilon(1e-12));
    }
}

TEST_CASE("force_scalar makes dispatched calls bit-identical to scalar") {
    kern::force_scalar(true);
    for (std::size_t n : kSizes) {
        auto a = fill(n, 10), b = fill(n, 11);
        CHECK(kern::dot(a.data(), b.data(), n) == kern::scalar::dot(a.data(), b.data(), n));

        auto y1 = fill(n, 12), y2 = y1;
        kern::axpy(1.75, a.data(), y1.data(), n);
        kern::scalar::axpy(1.75, a.data(), y2.data(), n);
        CHECK(y1 == y2);
    }
    kern::force_scalar(false);
}

TEST_CASE("rot applies the stated plane rotation") {
    double a[2] = {1.0, 0.0};
    double b[2] = {0.0, 1.0};
    kern::scalar::rot(a, b, 2, 0.6, 0.8);
    // a' = c*a - s*b, b' = s*a + c*b
    CHECK(a[0] == doctest::Approx(0.6));
    CHECK(a[1] == doctest::Approx(-0.8));
    CHECK(b[0] == doctest::Approx(0.8));
    CHECK(b[1] == doctest::Approx(0.6));
}

TEST_CASE("rotation preserves two-row norms") {
    auto a = fill(257, 20), b = fill(257, 21);
    double before = kern::scalar::dot(a.data(), a.data(), a.size()) +
                    kern::scalar::dot(b.data(), b.data(), b.size());
    const double c = std::cos(1.1), s = std::sin(1.1);
    kern::rot(a.data(), b.data(), a.size(), c, s);
    double after = kern::scalar::dot(a.data(), a.data(), a.size()) +
                   kern::scalar::dot(b.data(), b.data(), b.size());
    CHECK(after == doctest::Approx(before).epsilon(1e-13));
}

TEST_CASE("active_isa names a known implementation") {
    const std::string isa = kern::active_isa();
    CHECK((isa == "scalar" || isa == "avx2" || isa == "neon"));
}

TEST_CASE("sum2_sum4 on a hand case") {
    const double x[3] = {1.0, 2.0, -2.0};
    double s2 = 0, s4 = 0;
    kern::scalar::sum2_sum4(x, 3, s2, s4);
    CHECK(s2 == doctest::Approx(9.0));
    CHECK(s4 == doctest::Approx(33.0));
}
