#include "linalg.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace gdyn {

bool is_finite(const Matrix& m) {
    return m.allFinite();
}

double min_pairwise_gap(const Vector& lambdas) {
    const int n = static_cast<int>(lambdas.size());
    if (n < 2) return std::numeric_limits<double>::infinity();
    double g = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            g = std::min(g, std::abs(lambdas[i] - lambdas[j]));
    return g;
}

SpectralDecomposition eigendecompose(const Matrix& x, double gap_floor) {
    if (x.rows() != x.cols() || x.rows() < 1)
        fail(errc::invalid_argument, "eigendecompose: matrix must be square, n >= 1");
    if (!is_finite(x)) fail(errc::non_finite, "eigendecompose: input has NaN/Inf entries");

    const int n = static_cast<int>(x.rows());
    Eigen::ComplexEigenSolver<Matrix> solver(x, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        fail(errc::non_finite, "eigendecompose: eigensolver did not converge");

    // Sort eigenvalues lexicographically by (Re, Im); permute columns alongside.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const Vector& raw = solver.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (raw[a].real() != raw[b].real()) return raw[a].real() < raw[b].real();
        return raw[a].imag() < raw[b].imag();
    });

    SpectralDecomposition dec;
    dec.lambdas.resize(n);
    dec.s.resize(n, n);
    for (int k = 0; k < n; ++k) {
        dec.lambdas[k] = raw[order[k]];
        Vector col = solver.eigenvectors().col(order[k]);
        col /= col.norm();
        // Rotate the largest-modulus entry onto the positive real axis.
        int imax = 0;
        col.cwiseAbs().maxCoeff(&imax);
        const Complex pivot = col[imax];
        if (std::abs(pivot) > 0) col *= std::conj(pivot) / std::abs(pivot);
        dec.s.col(k) = col;
    }

    dec.min_gap = min_pairwise_gap(dec.lambdas);
    if (dec.min_gap < gap_floor)
        fail(errc::degenerate_spectrum, "eigendecompose: eigenvalue gap " +
                                            std::to_string(dec.min_gap) + " below floor " +
                                            std::to_string(gap_floor));

    dec.s_inv = dec.s.partialPivLu().inverse();
    dec.gauge = Gauge::Decomposition;
    if (!is_finite(dec.s_inv)) fail(errc::non_finite, "eigendecompose: singular eigenvector matrix");
    return dec;
}

OverlapMatrix overlap_matrix(const SpectralDecomposition& dec) {
    const Matrix a = dec.s.adjoint() * dec.s;
    Eigen::PartialPivLU<Matrix> lu(a);
    const Matrix a_inv = lu.inverse();
    if (!is_finite(a_inv)) fail(errc::singular_overlap, "overlap_matrix: A = S^dag S is singular");
    // Cheap condition estimate from norms.
    const double cond = a.cwiseAbs().maxCoeff() * a_inv.cwiseAbs().maxCoeff() * a.rows();
    if (cond > 1e14)
        fail(errc::singular_overlap,
             "overlap_matrix: A numerically singular (cond ~ " + std::to_string(cond) + ")");

    OverlapMatrix ov;
    ov.o = a_inv.cwiseProduct(a.transpose());  // O_ij = A^{-1}_ij A_ji
    ov.diag_real = ov.o.diagonal().real();
    return ov;
}

Matrix reconstruct(const SpectralDecomposition& dec) {
    return dec.s * dec.lambdas.asDiagonal() * dec.s_inv;
}

std::vector<int> match_eigenvalues(const Vector& prev, const Vector& next) {
    const int n = static_cast<int>(prev.size());
    if (next.size() != n) fail(errc::invalid_argument, "match_eigenvalues: size mismatch");

    // Greedy over globally sorted candidate pairs.
    struct Pair {
        double d;
        int i, j;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pairs.push_back({std::abs(prev[i] - next[j]), i, j});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    std::vector<int> perm(n, -1);
    std::vector<char> used(n, 0);
    int assigned = 0;
    for (const auto& p : pairs) {
        if (assigned == n) break;
        if (perm[p.i] >= 0 || used[p.j]) continue;
        perm[p.i] = p.j;
        used[p.j] = 1;
        ++assigned;
    }
    return perm;
}

}  // namespace gdyn
