#include <doctest.h>

#include "asymptotics.hpp"
#include "exact.hpp"
#include "quadrature.hpp"

using namespace gdyn;

TEST_CASE("saddle point: null source solves in closed form") {
    const auto src = SourceSpec::ginibre(5);
    for (double tau : {0.5, 1.0, 2.0}) {
        for (Complex z : {Complex(0.2, 0.1), Complex(1.5, -0.7)}) {
            const auto res = solve_min_saddle(tau, z, src);
            CHECK(res.converged);
            CHECK(res.sigma_min == doctest::Approx(std::norm(z) - tau).epsilon(1e-10));
        }
    }
}

TEST_CASE("macroscopic law: bulk profile and support cutoff") {
    const auto src = SourceSpec::ginibre(3);
    const double tau = 1.3;
    CHECK(macro_O(tau, Complex(0.4, 0.3), src) ==
          doctest::Approx((tau - 0.25) / (M_PI * tau * tau)).epsilon(1e-10));
    CHECK(macro_O(tau, Complex(2.0, 0.0), src) == 0.0);
    // on the boundary |z|^2 = tau the value is 0 (theta(0) = 0)
    CHECK(macro_O(tau, Complex(std::sqrt(tau), 0), src) == 0.0);
}

TEST_CASE("two-point closed form matches the saddle-point solver") {
    const Complex a(0.7, 0.2);
    const auto src = SourceSpec::spiric(a, 4);
    for (double tau : {0.3, 0.8}) {
        for (Complex z : {Complex(0.6, 0.25), Complex(-0.5, -0.3), Complex(0.05, 0.0)}) {
            CHECK(macro_spiric(tau, a, z) ==
                  doctest::Approx(macro_O(tau, z, src)).epsilon(1e-9));
        }
    }
}

TEST_CASE("edge law against reference values and limits") {
    CHECK(edge_micro_law(0.0, 1.0) == doctest::Approx(0.12698727186848194).epsilon(1e-13));
    CHECK(edge_micro_law(1.0, 1.0) == doctest::Approx(0.0027026745835834555).epsilon(1e-13));
    CHECK(edge_micro_law(-2.0, 1.3) == doctest::Approx(0.85901766770446981).epsilon(1e-13));
    CHECK(edge_micro_law(0.7, 0.5) == doctest::Approx(0.0057035135441129422).epsilon(1e-13));
    // deep outside: decays to zero; deep inside: linear bulk slope -2 delta/(pi tau^(3/2))
    CHECK(edge_micro_law(4.0, 1.0) < 1e-7);
    const double d = -5.0, tau = 1.0;
    CHECK(edge_micro_law(d, tau) ==
          doctest::Approx(-2 * d / (M_PI * std::pow(tau, 1.5))).epsilon(1e-6));
}

TEST_CASE("erfc agrees with its integral definition") {
    for (double x : {-1.5, -0.3, 0.0, 0.8, 2.5}) {
        const double q =
            2.0 / std::sqrt(M_PI) *
            integrate_gl([](double t) { return std::exp(-t * t); }, x, x + 14.0, 1e-12);
        CHECK(std::erfc(x) == doctest::Approx(q).epsilon(1e-10));
    }
}

TEST_CASE("collision law reduces to the edge law") {
    // substitution T* -> -2 delta sqrt(tau), |a|^2 -> tau, eta = 0
    for (double tau : {0.6, 1.0, 1.7}) {
        const Complex a(std::sqrt(tau), 0.0);
        for (double delta : {-2.5, -1.0, 0.0, 0.5, 2.0}) {
            const double t = -2.0 * delta * std::sqrt(tau);
            CHECK(collision_micro_law(Complex(0, 0), t, a) ==
                  doctest::Approx(edge_micro_law(delta, tau)).epsilon(1e-12));
        }
    }
}

TEST_CASE("collision law is positive and grows with rescaled time") {
    const Complex a(0.9, -0.3);
    double prev = 0;
    for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const double v = collision_micro_law(Complex(0.2, 0.1), t, a);
        CHECK(v > 0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("macroscopic law tracks the finite-N closed sum in the bulk") {
    const double tau = 1.0;
    const auto src = SourceSpec::ginibre(400);
    for (double r : {0.0, 0.3, 0.6}) {
        const double exact = ginibre_closed_sum(400, tau, r * r);
        const double bulk = macro_O(tau, Complex(r, 0), src);
        CHECK(exact == doctest::Approx(bulk).epsilon(0.02));
    }
}
