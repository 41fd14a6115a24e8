#pragma once

#include "quadrature.hpp"
#include "source.hpp"

namespace gdyn {

// Upper incomplete gamma for integer order, log-scaled.
struct GammaValue {
    double log_value;
    double value;  // exp(log_value); may underflow to 0 for large x
};

// Gamma(k, x) = (k-1)! e^{-x} sum_{m<k} x^m/m!, evaluated in log space.
// Relative error < 1e-12 for k <= 2000.
GammaValue upper_gamma_int(int k, double x);

struct ExactOpts {
    double tol_quad = kTolQuad;
    double fd_step_rel = 1e-3;     // density z-stencil step = fd_step_rel * sqrt(tau)
    double pole_floor_rel = 1e-6;  // reject when min_i |a_i - z|^2 < pole_floor_rel * tau
};

// Finite-N spectral density for the normal source X0 = diag(a_i), via the
// beta + contour integral representation (contour taken first, which is what
// keeps the small-beta behaviour integrable). Normalized so the plane
// integral is 1.
double density_source(int n, double tau, Complex z, const SourceSpec& source,
                      const ExactOpts& opts = {});

// Eigenvector correlator O(z, zbar), beta-contour representation.
double correlator_beta_form(int n, double tau, Complex z, const SourceSpec& source,
                            const ExactOpts& opts = {});

// Same quantity through the u-integral / sigma-contour representation.
double correlator_double_contour(int n, double tau, Complex z, const SourceSpec& source,
                                 const ExactOpts& opts = {});

// Null-source (Ginibre) closed forms as functions of r2 = |z|^2; stable to
// N ~ 5000 via log-sum-exp.
double ginibre_closed_sum(int n, double tau, double r2);     // correlator
double ginibre_density_closed(int n, double tau, double r2); // density

// Spectral-support indicator for the two-point source (a, -a):
// inside iff (tau/2)(A+ + A-) >= A+ A-.
bool spiric_inside(double tau, Complex a, Complex z);

}  // namespace gdyn
