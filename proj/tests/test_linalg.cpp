#include <doctest.h>

#include "linalg.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "source.hpp"

using namespace gdyn;

namespace {
Matrix random_matrix(int n, Rng& rng, double scale = 1.0) {
    Matrix x(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) = scale * rng.normal_complex();
    return x;
}
}  // namespace

TEST_CASE("eigendecomposition reconstructs the matrix") {
    Rng rng(11);
    for (int n : {2, 5, 17}) {
        const Matrix x = random_matrix(n, rng);
        const auto dec = eigendecompose(x);
        const Matrix back = reconstruct(dec);
        CHECK((back - x).cwiseAbs().maxCoeff() < kTolRecon * x.cwiseAbs().maxCoeff() * 10);
        CHECK((dec.s * dec.s_inv - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("overlap matrix: column sums are 1, diagonal >= 1") {
    Rng rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 12);
        const auto dec = eigendecompose(random_matrix(n, rng));
        const auto ov = overlap_matrix(dec);
        for (int j = 0; j < n; ++j) {
            Complex colsum = 0;
            for (int i = 0; i < n; ++i) colsum += ov.o(i, j);
            CHECK(std::abs(colsum - 1.0) < 1e-9);
            CHECK(ov.diag_real[j] >= 1.0 - 1e-9);
            CHECK(std::abs(ov.o(j, j).imag()) < 1e-9);
        }
    }
}

TEST_CASE("degenerate and non-finite inputs are rejected") {
    Matrix x = Matrix::Identity(3, 3);  // triple eigenvalue 1
    CHECK_THROWS_AS(eigendecompose(x), Error);
    try {
        eigendecompose(x);
    } catch (const Error& e) {
        CHECK(e.code() == errc::degenerate_spectrum);
        CHECK(e.exit_class() == 2);
    }
    x(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(eigendecompose(x), Error);
}

TEST_CASE("eigenvalue matching recovers a permutation") {
    Vector prev(4);
    prev << Complex(0, 0), Complex(1, 0), Complex(0, 1), Complex(1, 1);
    Vector next(4);
    // shuffled and slightly moved
    next << Complex(1.01, 1.0), Complex(0.02, 0.01), Complex(0.99, 0.0), Complex(0.0, 1.02);
    const auto p = match_eigenvalues(prev, next);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(next[p[i]] - prev[i]) < 0.05);
}

TEST_CASE("rng streams are deterministic and independent") {
    Rng a(42, 7), b(42, 7), c(42, 8);
    bool same = true, differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        same = same && (va == b.next_u64());
        differs = differs || (va != c.next_u64());
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("rng normal moments") {
    Rng rng(1);
    const long m = 200000;
    double sum = 0, sumsq = 0, sumabs2 = 0;
    for (long k = 0; k < m; ++k) {
        const double x = rng.normal();
        sum += x;
        sumsq += x * x;
        sumabs2 += std::norm(rng.normal_complex());
    }
    CHECK(std::abs(sum / m) < 0.01);
    CHECK(std::abs(sumsq / m - 1.0) < 0.02);
    CHECK(std::abs(sumabs2 / m - 1.0) < 0.02);  // E|g|^2 = 1
}

TEST_CASE("source text round trip") {
    const auto s = SourceSpec::parse("0.5,-0.25*3;-1,0");
    CHECK(s.total() == 4);
    CHECK(s.expand()[0] == Complex(0.5, -0.25));
    CHECK(s.expand()[3] == Complex(-1, 0));
    const auto back = SourceSpec::parse(s.to_string());
    CHECK(back.expand() == s.expand());
    CHECK_THROWS_AS(SourceSpec::parse("nonsense"), Error);
    CHECK_THROWS_AS(SourceSpec::parse("1,2*0"), Error);
    CHECK_THROWS_AS(SourceSpec::spiric(Complex(1, 0), 3), Error);
}

TEST_CASE("gauss-legendre quadrature") {
    const double v = integrate_gl([](double x) { return std::sin(M_PI * x); }, 0, 1);
    CHECK(std::abs(v - 2.0 / M_PI) < 1e-12);
    // order doubling gives up on a non-integrable endpoint singularity
    CHECK_THROWS_AS(integrate_gl([](double x) { return 1.0 / x; }, 0, 1, 1e-10), Error);
}

TEST_CASE("contour integral picks up residues and excludes the origin") {
    const auto c = contour_around({1.0, 3.0}, 1.0, 4);
    CHECK(c.center - c.semi_x > 0.0);  // origin outside
    const Complex one =
        contour_integral(c, [](Complex v, Complex dv) { return dv / (v - 2.0); });
    CHECK(std::abs(one - 1.0) < 1e-10);
    const Complex zero =
        contour_integral(c, [](Complex v, Complex dv) { return dv / (v + 1.0); });
    CHECK(std::abs(zero) < 1e-10);
}

TEST_CASE("expm1c accuracy near zero") {
    const Complex z(1e-9, -2e-9);
    const Complex r = expm1c(z);
    CHECK(std::abs(r - (z + 0.5 * z * z)) < 1e-24);
    CHECK(std::abs(expm1c(Complex(1.0, 0)) - (std::exp(1.0) - 1.0)) < 1e-14);
}
