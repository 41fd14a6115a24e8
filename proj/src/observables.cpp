#include "observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gdyn {

namespace {

// Mean / standard-error accumulator over per-sample bin values.
struct BinStats {
    std::vector<double> sum, sumsq;
    long count = 0;
    explicit BinStats(size_t bins) : sum(bins, 0.0), sumsq(bins, 0.0) {}
    void add(const std::vector<double>& per_sample) {
        for (size_t i = 0; i < sum.size(); ++i) {
            sum[i] += per_sample[i];
            sumsq[i] += per_sample[i] * per_sample[i];
        }
        ++count;
    }
    double mean(size_t i) const { return sum[i] / count; }
    double sem(size_t i) const {
        if (count < 2) return 0.0;
        const double m = mean(i);
        const double var = std::max(0.0, (sumsq[i] - count * m * m) / (count - 1));
        return std::sqrt(var / count);
    }
};

Window interior_window(const FieldGrid& g) {
    return {g.window.re_min + g.dx(), g.window.re_max - g.dx(), g.window.im_min + g.dy(),
            g.window.im_max - g.dy()};
}

}  // namespace

FieldGrid estimate_density(const std::vector<Vector>& samples, const Window& win, int nx, int ny) {
    if (samples.empty()) fail(errc::invalid_argument, "estimate_density: no samples");
    FieldGrid g(win, nx, ny);
    const int n = static_cast<int>(samples.front().size());
    BinStats stats(g.values.size());
    std::vector<double> per(g.values.size());
    bool any_hit = false;
    for (const auto& lams : samples) {
        std::fill(per.begin(), per.end(), 0.0);
        for (int i = 0; i < lams.size(); ++i) {
            const auto [ix, iy] = g.bin(lams[i]);
            if (ix < 0) continue;
            per[g.idx(ix, iy)] += 1.0;
            any_hit = true;
        }
        stats.add(per);
    }
    if (!any_hit) fail(errc::empty_window, "estimate_density: no eigenvalue in window");
    const double norm = 1.0 / (n * g.dx() * g.dy());
    for (size_t i = 0; i < g.values.size(); ++i) {
        g.values[i] = stats.mean(i) * norm;
        g.stderrs[i] = stats.sem(i) * norm;
    }
    g.meta.estimator = "density";
    g.meta.n = n;
    g.meta.samples = static_cast<long>(samples.size());
    return g;
}

FieldGrid estimate_O1(const std::vector<WeightedSample>& samples, const Window& win, int nx,
                      int ny) {
    if (samples.empty()) fail(errc::invalid_argument, "estimate_O1: no samples");
    FieldGrid g(win, nx, ny);
    const int n = static_cast<int>(samples.front().lambdas.size());
    BinStats stats(g.values.size());
    std::vector<double> per(g.values.size());
    bool any_hit = false;
    for (const auto& s : samples) {
        std::fill(per.begin(), per.end(), 0.0);
        for (int i = 0; i < s.lambdas.size(); ++i) {
            const auto [ix, iy] = g.bin(s.lambdas[i]);
            if (ix < 0) continue;
            per[g.idx(ix, iy)] += s.weights[i];
            any_hit = true;
        }
        stats.add(per);
    }
    if (!any_hit) fail(errc::empty_window, "estimate_O1: no eigenvalue in window");
    const double norm = 1.0 / (static_cast<double>(n) * n * g.dx() * g.dy());
    for (size_t i = 0; i < g.values.size(); ++i) {
        g.values[i] = stats.mean(i) * norm;
        g.stderrs[i] = stats.sem(i) * norm;
    }
    g.meta.estimator = "O1";
    g.meta.n = n;
    g.meta.samples = static_cast<long>(samples.size());
    return g;
}

std::pair<ProductGrid, ProductGrid> estimate_rho2_O2(const std::vector<TwoPointSample>& samples,
                                                     const Window& win, int nx, int ny) {
    if (samples.empty()) fail(errc::invalid_argument, "estimate_rho2_O2: no samples");
    if (nx * ny > 32 * 32) fail(errc::invalid_argument, "estimate_rho2_O2: grid too fine");
    FieldGrid ref(win, nx, ny);  // for binning geometry only
    const size_t bins = ref.values.size() * ref.values.size();
    const int n = static_cast<int>(samples.front().lambdas.size());
    BinStats rho_stats(bins), o_stats(bins);
    std::vector<double> rho_per(bins), o_per(bins);
    for (const auto& s : samples) {
        std::fill(rho_per.begin(), rho_per.end(), 0.0);
        std::fill(o_per.begin(), o_per.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            const auto [i1, j1] = ref.bin(s.lambdas[i]);
            if (i1 < 0) continue;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const auto [i2, j2] = ref.bin(s.lambdas[j]);
                if (i2 < 0) continue;
                const size_t k = ref.idx(i1, j1) * ref.values.size() + ref.idx(i2, j2);
                rho_per[k] += 1.0;
                o_per[k] += std::real(s.o(i, j));
            }
        }
        rho_stats.add(rho_per);
        o_stats.add(o_per);
    }
    const double area2 = ref.dx() * ref.dy() * ref.dx() * ref.dy();
    const double norm = 1.0 / (static_cast<double>(n) * n * area2);
    ProductGrid rho2{win, nx, ny, std::vector<double>(bins), std::vector<double>(bins)};
    ProductGrid o2 = rho2;
    for (size_t k = 0; k < bins; ++k) {
        rho2.values[k] = rho_stats.mean(k) * norm;
        rho2.stderrs[k] = rho_stats.sem(k) * norm;
        o2.values[k] = o_stats.mean(k) * norm;
        o2.stderrs[k] = o_stats.sem(k) * norm;
    }
    return {std::move(rho2), std::move(o2)};
}

RealVector ecp_spectrum(const Matrix& x, Complex z) {
    if (!is_finite(x)) fail(errc::non_finite, "ecp_spectrum: non-finite input");
    const int n = static_cast<int>(x.rows());
    const Matrix zi = z * Matrix::Identity(n, n) - x;
    const Matrix p = zi * zi.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(p);
    if (solver.info() != Eigen::Success) fail(errc::non_finite, "ecp_spectrum: solver failed");
    return solver.eigenvalues();
}

double ecp_value(const Matrix& x, Complex z, Complex w) {
    const RealVector p = ecp_spectrum(x, z);
    const double u = std::norm(w);
    double d = 1.0;
    for (int i = 0; i < p.size(); ++i) d *= p[i] + u;
    return d;
}

double ecp_block_value(const Matrix& x, Complex z, Complex w) {
    const auto dec = eigendecompose(x);
    const int n = dec.n();
    const Matrix a = dec.s.adjoint() * dec.s;
    const Matrix a_inv = a.partialPivLu().inverse();
    Matrix m = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = z - dec.lambdas[i];
        m(n + i, n + i) = std::conj(z) - std::conj(dec.lambdas[i]);
    }
    m.block(0, n, n, n) = -std::conj(w) * a_inv;
    m.block(n, 0, n, n) = w * a;
    return std::real(m.partialPivLu().determinant());
}

HeatResidual ecp_heat_residual(const SimConfig& config, Complex z,
                               const std::vector<double>& w_grid,
                               const std::vector<double>& t_grid, long trajectories) {
    if (config.scheme != Scheme::MatrixBM)
        fail(errc::invalid_argument, "ecp_heat_residual: requires the matrix Brownian scheme");
    if (t_grid.size() < 3) fail(errc::invalid_argument, "ecp_heat_residual: need >= 3 times");
    if (w_grid.empty() || trajectories < 2)
        fail(errc::invalid_argument, "ecp_heat_residual: bad grid or sample count");
    const double dt_grid = t_grid[1] - t_grid[0];
    for (size_t k = 1; k < t_grid.size(); ++k)
        if (std::abs(t_grid[k] - t_grid[k - 1] - dt_grid) > 1e-9 * (1 + dt_grid))
            fail(errc::invalid_argument, "ecp_heat_residual: t grid must be uniform");
    double w_min = w_grid[0];
    for (double w : w_grid) {
        if (w <= 0) fail(errc::invalid_argument, "ecp_heat_residual: w values must be positive");
        w_min = std::min(w_min, w);
    }
    const double h = 0.25 * w_min;  // w-stencil step

    const size_t nt = t_grid.size(), nw = w_grid.size();
    const size_t cells = (nt - 2) * nw;
    HeatResidual out;
    out.t.assign(t_grid.begin() + 1, t_grid.end() - 1);
    out.w = w_grid;
    out.residual.assign(cells, 0.0);
    out.stderrs.assign(cells, 0.0);

    std::vector<double> sum(cells, 0.0), sumsq(cells, 0.0);
    const Vector a = config.source.expand();
    for (long traj = 0; traj < trajectories; ++traj) {
        Rng rng(config.seed, static_cast<uint64_t>(traj));
        Matrix x = Matrix::Zero(config.n, config.n);
        x.diagonal() = a;
        double time = 0;
        // d[k][iw_stencil]: D at time t_k for each (w, stencil point).
        std::vector<std::vector<double>> d(nt, std::vector<double>(5 * nw));
        for (size_t k = 0; k < nt; ++k) {
            const long steps = std::lround((t_grid[k] - time) / config.dt);
            for (long s = 0; s < steps; ++s)
                x += draw_increment(config.n, config.convention.variance_rate, config.dt, rng);
            time += steps * config.dt;
            const RealVector p = ecp_spectrum(x, z);
            auto prod = [&](double u) {
                double v = 1.0;
                for (int i = 0; i < p.size(); ++i) v *= p[i] + u;
                return v;
            };
            for (size_t iw = 0; iw < nw; ++iw) {
                const double w = w_grid[iw];
                double* cell = &d[k][5 * iw];
                cell[0] = prod(w * w);
                cell[1] = prod((w + h) * (w + h));
                cell[2] = prod((w - h) * (w - h));
                cell[3] = prod(w * w + h * h);  // w +- ih share |w|^2
                cell[4] = cell[3];
            }
        }
        for (size_t k = 1; k + 1 < nt; ++k)
            for (size_t iw = 0; iw < nw; ++iw) {
                const double dt_term = (d[k + 1][5 * iw] - d[k - 1][5 * iw]) / (2 * dt_grid);
                const double* c = &d[k][5 * iw];
                const double lap = (c[1] + c[2] + c[3] + c[4] - 4 * c[0]) / (h * h);
                const double r = dt_term - 0.25 * lap;
                const size_t cell = (k - 1) * nw + iw;
                sum[cell] += r;
                sumsq[cell] += r * r;
            }
    }
    for (size_t c = 0; c < cells; ++c) {
        const double m = sum[c] / trajectories;
        const double var =
            std::max(0.0, (sumsq[c] - trajectories * m * m) / (trajectories - 1));
        out.residual[c] = m;
        out.stderrs[c] = std::sqrt(var / trajectories);
    }
    return out;
}

EcpFields ecp_observables(const std::vector<Matrix>& samples, const Window& win, int nx, int ny,
                          double w_abs, double var_threshold) {
    if (samples.size() < 2) fail(errc::invalid_argument, "ecp_observables: need >= 2 samples");
    if (nx < 3 || ny < 3) fail(errc::invalid_argument, "ecp_observables: grid too small");
    if (w_abs <= 0) fail(errc::invalid_argument, "ecp_observables: w_abs must be positive");
    FieldGrid ref(win, nx, ny);
    const int n = static_cast<int>(samples.front().rows());
    const double h = 0.25 * w_abs;
    const size_t nodes = ref.values.size();
    const long s_count = static_cast<long>(samples.size());

    // Per-sample log D at |w|, |w + h|, |w - h|; accumulated raw for the
    // variance gate, and as the final finite-difference combinations so the
    // error bars reflect the correlated stencil.
    const int inx = nx - 2, iny = ny - 2;
    FieldGrid density(interior_window(ref), inx, iny);
    FieldGrid ofield = density;
    std::vector<double> l0_sum(nodes, 0.0), l0_sumsq(nodes, 0.0);
    std::vector<double> lap_sum(density.values.size(), 0.0), lap_sumsq(density.values.size(), 0.0);
    std::vector<double> dw_sum(density.values.size(), 0.0), dw_sumsq(density.values.size(), 0.0);

    std::vector<double> l0(nodes), lp(nodes), lm(nodes);
    const double u0 = w_abs * w_abs, up = (w_abs + h) * (w_abs + h), um = (w_abs - h) * (w_abs - h);
    for (const auto& x : samples) {
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const RealVector p = ecp_spectrum(x, ref.center(ix, iy));
                double a0 = 0, ap = 0, am = 0;
                for (int i = 0; i < p.size(); ++i) {
                    a0 += std::log(p[i] + u0);
                    ap += std::log(p[i] + up);
                    am += std::log(p[i] + um);
                }
                const size_t k = ref.idx(ix, iy);
                l0[k] = a0;
                lp[k] = ap;
                lm[k] = am;
                l0_sum[k] += a0;
                l0_sumsq[k] += a0 * a0;
            }
        for (int iy = 1; iy + 1 < ny; ++iy)
            for (int ix = 1; ix + 1 < nx; ++ix) {
                const double lap =
                    (l0[ref.idx(ix + 1, iy)] - 2 * l0[ref.idx(ix, iy)] + l0[ref.idx(ix - 1, iy)]) /
                        (ref.dx() * ref.dx()) +
                    (l0[ref.idx(ix, iy + 1)] - 2 * l0[ref.idx(ix, iy)] + l0[ref.idx(ix, iy - 1)]) /
                        (ref.dy() * ref.dy());
                // d_w <log D> at real w: the imaginary-direction stencil
                // cancels because log D depends on |w| only.
                const double dw = (lp[ref.idx(ix, iy)] - lm[ref.idx(ix, iy)]) / (4 * h);
                const size_t c = density.idx(ix - 1, iy - 1);
                lap_sum[c] += lap;
                lap_sumsq[c] += lap * lap;
                dw_sum[c] += dw;
                dw_sumsq[c] += dw * dw;
            }
    }
    for (size_t k = 0; k < nodes; ++k) {
        const double m = l0_sum[k] / s_count;
        const double var = std::max(0.0, (l0_sumsq[k] - s_count * m * m) / (s_count - 1));
        if (var > var_threshold)
            fail(errc::regulator_too_small,
                 "ecp_observables: log D variance " + std::to_string(var) + " exceeds threshold");
    }
    auto finish = [&](const std::vector<double>& s, const std::vector<double>& sq, size_t c,
                      double& mean, double& sem) {
        mean = s[c] / s_count;
        const double var = std::max(0.0, (sq[c] - s_count * mean * mean) / (s_count - 1));
        sem = std::sqrt(var / s_count);
    };
    for (size_t c = 0; c < density.values.size(); ++c) {
        double lap, lap_se, dw, dw_se;
        finish(lap_sum, lap_sumsq, c, lap, lap_se);
        finish(dw_sum, dw_sumsq, c, dw, dw_se);
        density.values[c] = 0.25 * lap / (M_PI * n);
        density.stderrs[c] = 0.25 * lap_se / (M_PI * n);
        ofield.values[c] = dw * dw / (M_PI * n * n);
        ofield.stderrs[c] = 2 * std::abs(dw) * dw_se / (M_PI * n * n);
    }
    density.meta.estimator = "ecp_density_regulated";
    density.meta.n = n;
    density.meta.samples = s_count;
    ofield.meta.estimator = "ecp_O_regulated";
    ofield.meta.n = n;
    ofield.meta.samples = s_count;
    return {std::move(density), std::move(ofield)};
}

std::vector<FieldGrid> hierarchy_residual(const std::vector<double>& taus,
                                          const std::vector<FieldGrid>& rho,
                                          const std::vector<FieldGrid>& o) {
    if (taus.size() < 3 || rho.size() != taus.size() || o.size() != taus.size())
        fail(errc::grid_mismatch, "hierarchy_residual: need matching tau/rho/o ladders, >= 3");
    const double dtau = taus[1] - taus[0];
    for (size_t k = 1; k < taus.size(); ++k)
        if (std::abs(taus[k] - taus[k - 1] - dtau) > 1e-9 * (1 + std::abs(dtau)))
            fail(errc::grid_mismatch, "hierarchy_residual: tau ladder must be uniform");
    for (size_t k = 0; k < taus.size(); ++k)
        if (!rho[k].same_layout(rho[0]) || !o[k].same_layout(rho[0]))
            fail(errc::grid_mismatch, "hierarchy_residual: grids differ in layout");
    const FieldGrid& ref = rho[0];
    if (ref.nx < 3 || ref.ny < 3) fail(errc::grid_mismatch, "hierarchy_residual: grid too small");

    std::vector<FieldGrid> out;
    const double cx = 1.0 / (ref.dx() * ref.dx());
    const double cy = 1.0 / (ref.dy() * ref.dy());
    for (size_t k = 1; k + 1 < taus.size(); ++k) {
        FieldGrid res(interior_window(ref), ref.nx - 2, ref.ny - 2);
        for (int iy = 1; iy + 1 < ref.ny; ++iy)
            for (int ix = 1; ix + 1 < ref.nx; ++ix) {
                const double drho =
                    (rho[k + 1].at(ix, iy) - rho[k - 1].at(ix, iy)) / (2 * dtau);
                const double lap =
                    cx * (o[k].at(ix + 1, iy) - 2 * o[k].at(ix, iy) + o[k].at(ix - 1, iy)) +
                    cy * (o[k].at(ix, iy + 1) - 2 * o[k].at(ix, iy) + o[k].at(ix, iy - 1));
                res.at(ix - 1, iy - 1) = drho - 0.25 * lap;
                auto sq = [](double v) { return v * v; };
                const double var =
                    (sq(rho[k + 1].se(ix, iy)) + sq(rho[k - 1].se(ix, iy))) / sq(2 * dtau) +
                    sq(0.25) * (sq(cx * o[k].se(ix + 1, iy)) + sq(cx * o[k].se(ix - 1, iy)) +
                                sq(cy * o[k].se(ix, iy + 1)) + sq(cy * o[k].se(ix, iy - 1)) +
                                sq(2 * (cx + cy) * o[k].se(ix, iy)));
                res.se(ix - 1, iy - 1) = std::sqrt(var);
            }
        res.meta.estimator = "hierarchy_residual";
        res.meta.tau = taus[k];
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace gdyn
