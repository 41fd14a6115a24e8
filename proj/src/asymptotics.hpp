#pragma once

#include "source.hpp"

namespace gdyn {

struct SaddleResult {
    double sigma_min = 0;
    bool converged = false;
    int iterations = 0;
};

// Smallest root of g(sigma) = -1/tau + (1/N) sum_i m_i/(A_i - sigma) on
// (-inf, min_i A_i); g is strictly increasing there, so the root is unique.
SaddleResult solve_min_saddle(double tau, Complex z, const SourceSpec& source);

// Large-N bulk correlator: (-sigma_min) theta(-sigma_min) / (pi tau^2);
// theta(0) = 0, so the value is 0 on the support boundary itself.
double macro_O(double tau, Complex z, const SourceSpec& source);

// Ginibre edge scaling law at |z| = sqrt(tau) + delta/sqrt(N), rescaled by
// sqrt(N).
double edge_micro_law(double delta, double tau);

// Spiric collision scaling law at z = eta N^{-1/4}, tau = |a|^2 + t/sqrt(N),
// rescaled by sqrt(N).
double collision_micro_law(Complex eta, double t, Complex a);

// Closed-form bulk correlator for the two-point source (a, -a); 0 outside
// the spiric support curve.
double macro_spiric(double tau, Complex a, Complex z);

}  // namespace gdyn
