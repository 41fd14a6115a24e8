#include <doctest.h>

#include "sfp.hpp"

using namespace gdyn;

TEST_CASE("sampled test points are well conditioned") {
    Rng rng(2);
    for (int n : {2, 4}) {
        const SfpPoint p = sample_sfp_point(n, rng);
        CHECK(p.dec.min_gap > 1e-3);
        CHECK((p.a * p.a_inv - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
        // overlap column sums are 1
        for (int j = 0; j < n; ++j) {
            Complex colsum = 0;
            for (int i = 0; i < n; ++i) colsum += p.o(i, j);
            CHECK(std::abs(colsum - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("eigenvalue-eigenvalue coefficient is the overlap matrix") {
    Rng rng(3);
    const SfpPoint p = sample_sfp_point(3, rng);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(coef_lambda_lambda(p, i, j) - p.o(i, j)) < 1e-14);
}

TEST_CASE("mixed coefficients are conjugate-symmetric") {
    // dS_kl dlambar_i and its mirror dlam_i dSbar_kl are complex conjugates.
    Rng rng(4);
    const SfpPoint p = sample_sfp_point(3, rng);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
                CHECK(std::abs(coef_s_lambda(p, i, k, l) -
                               std::conj(coef_lambda_sbar(p, i, k, l))) < 1e-12);
    // dS dSbar is Hermitian in the paired index (k,l) <-> (n,m)
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
            CHECK(std::abs(coef_s_sbar(p, k, l, k, l).imag()) <
                  1e-12 * (1 + std::abs(coef_s_sbar(p, k, l, k, l))));
}

TEST_CASE("closed-form derivatives of A and A^{-1}") {
    Rng rng(5);
    for (int n : {2, 3, 4}) {
        const SfpPoint p = sample_sfp_point(n, rng);
        CHECK(check_derivative_ids(p) < 1e-6);
    }
}

TEST_CASE("operator identities cancel to rounding") {
    Rng rng(6);
    for (int n : {2, 3, 4, 5, 6}) {
        const SfpPoint p = sample_sfp_point(n, rng);
        CHECK(check_TQ(p) < 1e-10);
        const auto [b1, b2] = check_TdQ(p);
        CHECK(b1 < 1e-10);
        CHECK(b2 < 1e-10);
    }
}

TEST_CASE("one-step covariances match the coefficients") {
    Rng rng(7);
    for (int n : {2, 3}) {
        const SfpPoint p = sample_sfp_point(n, rng);
        CHECK(check_covariances(p, 20000, 1e-4, rng) < 4.0);
    }
}

TEST_CASE("transition kernel solves the evolution equation at N = 2") {
    Rng rng(8);
    const SfpPoint p = sample_sfp_point(2, rng, 4.0);
    Matrix x0 = reconstruct(p.dec);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) x0(i, j) += 0.3 * rng.normal_complex();
    const double r = check_Q_solution(0.5, p, x0);
    CHECK(r < 1e-4);
    // residual is finite-difference truncation: halving the step cuts it ~4x
    const double r_half = check_Q_solution(0.5, p, x0, 0.5e-4);
    CHECK(r / r_half > 2.5);
}
