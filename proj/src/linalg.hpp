#pragma once

#include <Eigen/Dense>
#include <complex>

#include "error.hpp"

namespace gdyn {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kTolRecon = 1e-9;    // relative, max norm
inline constexpr double kTolAlg = 1e-10;     // absolute, algebraic identities
inline constexpr double kDefaultGapFloor = 1e-8;

// Gauge of the eigenvector matrix S.
//  Decomposition: unit-norm columns, largest-modulus entry rotated to the
//                 positive real axis; produced by eigendecompose().
//  Trajectory:    S evolved by the Dyson integrator, which keeps the diagonal
//                 variation delta S_ii = 0 along the path.
// S entries are only comparable within one gauge; the overlap matrix is gauge
// invariant.
enum class Gauge { Decomposition, Trajectory };

struct SpectralDecomposition {
    Vector lambdas;   // eigenvalues, sorted (Re, Im) for Decomposition gauge
    Matrix s;         // right eigenvectors as columns
    Matrix s_inv;     // rows are the (biorthogonal) left eigenvectors
    Gauge gauge = Gauge::Decomposition;
    double min_gap = 0.0;

    int n() const { return static_cast<int>(lambdas.size()); }
};

// O_ij = A^{-1}_ij A_ji with A = S^dag S. Diagonal entries are real and >= 1.
struct OverlapMatrix {
    Matrix o;
    RealVector diag_real;
};

bool is_finite(const Matrix& m);
double min_pairwise_gap(const Vector& lambdas);

// Full non-Hermitian eigendecomposition X = S Lambda S^{-1}.
// Throws: errc::non_finite for NaN/Inf input, errc::degenerate_spectrum if
// the smallest eigenvalue gap is below gap_floor.
SpectralDecomposition eigendecompose(const Matrix& x, double gap_floor = kDefaultGapFloor);

// Throws errc::singular_overlap when A = S^dag S is numerically singular.
OverlapMatrix overlap_matrix(const SpectralDecomposition& dec);

Matrix reconstruct(const SpectralDecomposition& dec);

// Greedy nearest-neighbor assignment of `next` onto `prev` (trajectory
// continuity across snapshots); ties broken lexicographically. Returns the
// permutation p with matched[i] = next[p[i]] closest to prev[i].
std::vector<int> match_eigenvalues(const Vector& prev, const Vector& next);

}  // namespace gdyn
