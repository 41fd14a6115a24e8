#pragma once

#include <functional>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"

namespace gdyn {

inline constexpr double kTolQuad = 1e-8;

// Gauss-Legendre nodes/weights on [0, 1]; cached per order.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int order);

// Counter-clockwise ellipse around an interval of the real axis. Poles are
// expected strictly inside; the left vertex stays strictly positive so that
// v = 0 (and the negative real axis) remain outside.
struct EllipseContour {
    double center;   // real
    double semi_x;   // horizontal semi-axis
    double semi_y;   // vertical semi-axis

    Complex point(double theta) const {
        return {center + semi_x * std::cos(theta), semi_y * std::sin(theta)};
    }
    Complex derivative(double theta) const {
        return {-semi_x * std::sin(theta), semi_y * std::cos(theta)};
    }
};

// Contour enclosing all values of `poles` (real, positive) with clearance
// proportional to the smallest pole, excluding the origin.
EllipseContour contour_around(const std::vector<double>& poles, double tau, int n);

// (1/2pi i) closed contour integral by the trapezoidal rule (spectrally
// accurate for periodic analytic integrands), doubling the node count from
// `start_nodes` until successive levels agree to tol.
// Throws errc::quadrature_nonconverged past max_nodes.
Complex contour_integral(const EllipseContour& c, const std::function<Complex(Complex, Complex)>& f,
                         double tol = kTolQuad, int start_nodes = 64, int max_nodes = 16384);

// Integral over [a, b] by Gauss-Legendre with order doubling until converged.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    double tol = kTolQuad, int start_order = 32, int max_order = 1024);

// exp(z) - 1 with full relative accuracy near z = 0.
Complex expm1c(Complex z);

}  // namespace gdyn
