#pragma once

#include "linalg.hpp"
#include "rng.hpp"

namespace gdyn {

// Random well-conditioned test point for the Fokker-Planck identity checks:
// eigenvalues in the unit disk with pairwise gaps > 1e-3, eigenvector matrix
// from the complex Gaussian ensemble conditioned on cond(S) < 1e3.
struct SfpPoint {
    SpectralDecomposition dec;
    Matrix a;      // S^dag S
    Matrix a_inv;
    Matrix o;      // overlap, A^{-1}_ij A_ji
};
SfpPoint sample_sfp_point(int n, Rng& rng, double max_cond = 1e3);
SfpPoint make_sfp_point(const Vector& lambdas, const Matrix& s);

// Itô covariance coefficients of the eigenvalue/eigenvector system.
Complex coef_lambda_lambda(const SfpPoint& p, int i, int j);          // dlam_i dlambar_j / dt
Complex coef_s_lambda(const SfpPoint& p, int i, int k, int l);        // dS_kl dlambar_i / dt
Complex coef_lambda_sbar(const SfpPoint& p, int i, int k, int l);     // dlam_i dSbar_kl / dt
Complex coef_s_sbar(const SfpPoint& p, int k, int l, int n, int m);   // dS_kl dSbar_nm / dt

// Max deviation between the closed-form derivatives of A, A^{-1} in the S
// entries and Richardson-extrapolated centered differences.
double check_derivative_ids(const SfpPoint& p, double fd_step = 1e-5);

// Residual of the four-term cancellation behind the Q-independent part of the
// Fokker-Planck operator, relative to the largest contributing term.
double check_TQ(const SfpPoint& p);

// Residuals of the two first-derivative bracket cancellations (relative).
// The derivative sums are evaluated from un-collapsed matrix products so
// errors in the underlying derivative identities would surface here.
std::pair<double, double> check_TdQ(const SfpPoint& p);

// Monte Carlo check of all three covariance predictions from one-step
// increments at a fixed point; returns the max deviation in standard errors.
double check_covariances(const SfpPoint& p, long n_draws, double dt, Rng& rng);

// Pointwise residual of the N = 2 transition-kernel solution in the
// eigenvalue/eigenvector Fokker-Planck equation, all derivatives by centered
// finite differences over the 12 real coordinates.
// Throws errc::step_too_large when halving the step shifts the residual by
// more than 50% (Richardson disagreement).
double check_Q_solution(double t, const SfpPoint& p, const Matrix& x0, double fd_step = 1e-4);

}  // namespace gdyn
