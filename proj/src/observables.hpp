#pragma once

#include <vector>

#include "grid.hpp"
#include "integrators.hpp"
#include "linalg.hpp"

namespace gdyn {

// Normalized one-point density (integral over the plane = 1) from eigenvalue
// sets; per-bin standard error from the sample-to-sample spread.
// Throws errc::empty_window if no eigenvalue lands in the window.
FieldGrid estimate_density(const std::vector<Vector>& samples, const Window& win, int nx, int ny);

// Diagonal-overlap-weighted density, O(z) = (1/N^2) <sum_a O_aa delta(z - lambda_a)>.
struct WeightedSample {
    Vector lambdas;
    RealVector weights;  // O_aa per eigenvalue
};
FieldGrid estimate_O1(const std::vector<WeightedSample>& samples, const Window& win, int nx,
                      int ny);

// Two-point estimators on the product of a coarse grid with itself; index
// (i1, j1, i2, j2) flattened as ((j1*nx + i1)*ny + j2)*nx + i2.
struct ProductGrid {
    Window window;
    int nx = 0, ny = 0;
    std::vector<double> values;
    std::vector<double> stderrs;
    size_t idx(int i1, int j1, int i2, int j2) const {
        return ((static_cast<size_t>(j1) * nx + i1) * ny + j2) * nx + i2;
    }
};
struct TwoPointSample {
    Vector lambdas;
    Matrix o;  // full overlap matrix
};
// Returns {rho2, O2}; rho2 normalized by N^2, O2 by N^2 (both per unit area^2).
std::pair<ProductGrid, ProductGrid> estimate_rho2_O2(const std::vector<TwoPointSample>& samples,
                                                     const Window& win, int nx, int ny);

// Extended characteristic polynomial D = det[(z - X)(zbar - X^dag) + |w|^2],
// through the Hermitian N x N product form (always real, >= 0).
double ecp_value(const Matrix& x, Complex z, Complex w);
// Same through the 2N x 2N eigenbasis block determinant (cross-check form).
double ecp_block_value(const Matrix& x, Complex z, Complex w);

// Hermitian eigenvalues of (z - X)(zbar - X^dag); D(w) = prod_i (p_i + |w|^2),
// so one solve serves every w.
RealVector ecp_spectrum(const Matrix& x, Complex z);

// Monte Carlo residual of d_t <D> = d_w d_wbar <D> on the interior of a
// uniform (t, w) grid, for matrix Brownian motion started from config.source.
struct HeatResidual {
    std::vector<double> t;  // interior time points
    std::vector<double> w;  // w grid (real regulator values)
    std::vector<double> residual;  // index iw + w.size() * it
    std::vector<double> stderrs;
};
HeatResidual ecp_heat_residual(const SimConfig& config, Complex z,
                               const std::vector<double>& w_grid,
                               const std::vector<double>& t_grid, long trajectories);

// Regulated density / correlator fields from <log D> at fixed |w| = w_abs:
// rho = (1/pi N) d_z d_zbar <log D>, O = (1/pi N^2) |d_w <log D>|^2, both by
// centered differences; returned on the interior (nx-2) x (ny-2) window.
// These are |w|-regulated approximations, not the w -> 0 limit.
// Throws errc::regulator_too_small when the per-point sample variance of
// log D exceeds var_threshold.
struct EcpFields {
    FieldGrid density;
    FieldGrid o;
};
EcpFields ecp_observables(const std::vector<Matrix>& samples, const Window& win, int nx, int ny,
                          double w_abs, double var_threshold = 100.0);

// Centered residual of d_tau rho = d_z d_zbar O at the interior times of a
// uniform tau ladder; rho[k], o[k] must share one grid layout.
// Throws errc::grid_mismatch otherwise.
std::vector<FieldGrid> hierarchy_residual(const std::vector<double>& taus,
                                          const std::vector<FieldGrid>& rho,
                                          const std::vector<FieldGrid>& o);

}  // namespace gdyn
