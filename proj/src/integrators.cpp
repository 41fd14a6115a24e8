#include "integrators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gdyn {

namespace {

Vector eigenvalues_only(const Matrix& x) {
    Eigen::ComplexEigenSolver<Matrix> solver(x, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        fail(errc::non_finite, "eigenvalue computation failed");
    return solver.eigenvalues();
}

void sort_lex(Vector& v) {
    std::vector<Complex> tmp(v.data(), v.data() + v.size());
    std::sort(tmp.begin(), tmp.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    for (int i = 0; i < v.size(); ++i) v[i] = tmp[i];
}

}  // namespace

Matrix draw_increment(int n, double variance_rate, double dt, Rng& rng) {
    const double scale = std::sqrt(variance_rate * dt);
    Matrix dx(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dx(i, j) = scale * rng.normal_complex();
    return dx;
}

void step_matrix_bm(TrajectoryState& st, const NoiseConvention& conv, double dt, Rng& rng) {
    st.x += draw_increment(static_cast<int>(st.x.rows()), conv.variance_rate, dt, rng);
    st.time += dt;
}

void step_matrix_ou(TrajectoryState& st, const NoiseConvention& conv, double dt, Rng& rng) {
    st.x += -conv.drift_coeff * dt * st.x +
            draw_increment(static_cast<int>(st.x.rows()), conv.variance_rate, dt, rng);
    st.time += dt;
}

void step_dyson(TrajectoryState& st, const Matrix& dx, double dt, double gap_floor) {
    if (!st.dec) fail(errc::invalid_argument, "step_dyson: state has no decomposition");
    SpectralDecomposition& dec = *st.dec;
    const int n = dec.n();
    if (min_pairwise_gap(dec.lambdas) < gap_floor)
        fail(errc::gap_collapse, "step_dyson: eigenvalue gap below floor");

    const Matrix delta = dec.s_inv * dx * dec.s;  // rotated increment
    // Off-diagonal generator M_lj = delta_lj / (lambda_j - lambda_l); the
    // vanishing diagonal is the gauge choice that closes the system.
    Matrix m = Matrix::Zero(n, n);
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j)
            if (l != j) m(l, j) = delta(l, j) / (dec.lambdas[j] - dec.lambdas[l]);
    dec.s += dec.s * m;
    for (int i = 0; i < n; ++i) dec.lambdas[i] += delta(i, i);
    dec.s_inv = dec.s.partialPivLu().inverse();
    dec.gauge = Gauge::Trajectory;
    dec.min_gap = min_pairwise_gap(dec.lambdas);
    if (!is_finite(dec.s) || !is_finite(dec.s_inv))
        fail(errc::non_finite, "step_dyson: eigenvector update overflowed");
    st.time += dt;
}

void step_coulomb(Vector& lambdas, int n, double dt, double gap_floor, Rng& rng) {
    if (min_pairwise_gap(lambdas) < gap_floor)
        fail(errc::gap_collapse, "step_coulomb: eigenvalue gap below floor");
    // <dB^a_i dB^b_j> = (1/2N) delta delta dt, noise prefactor sqrt(2).
    const double noise = std::sqrt(dt / n);
    Vector next = lambdas;
    for (int j = 0; j < static_cast<int>(lambdas.size()); ++j) {
        Complex drift = -2.0 * lambdas[j];
        for (int k = 0; k < static_cast<int>(lambdas.size()); ++k) {
            if (k == j) continue;
            const Complex d = lambdas[k] - lambdas[j];
            drift -= (2.0 / n) * d / std::norm(d);
        }
        next[j] += drift * dt + noise * Complex(rng.normal(), rng.normal());
    }
    lambdas = next;
}

std::vector<TrajectorySnapshot> run_trajectory(const SimConfig& config, uint64_t trajectory_index) {
    if (config.n < 1) fail(errc::invalid_argument, "run_trajectory: n must be >= 1");
    if (config.steps < 0) fail(errc::invalid_argument, "run_trajectory: steps must be >= 0");
    if (config.steps > 0 && config.dt <= 0)
        fail(errc::invalid_argument, "run_trajectory: dt must be positive");
    if (config.snapshot_every < 1)
        fail(errc::invalid_argument, "run_trajectory: snapshot_every must be >= 1");
    if (config.source.total() != config.n)
        fail(errc::invalid_argument, "run_trajectory: source size does not match n");
    if (config.x0 && (config.x0->rows() != config.n || config.x0->cols() != config.n))
        fail(errc::invalid_argument, "run_trajectory: x0 size does not match n");

    Rng rng(config.seed, trajectory_index);
    const Vector a = config.source.expand();
    const bool matrix_scheme =
        config.scheme == Scheme::MatrixBM || config.scheme == Scheme::MatrixOU;

    TrajectoryState st;
    st.time = 0;
    if (matrix_scheme) {
        if (config.x0) {
            st.x = *config.x0;
        } else {
            st.x = Matrix::Zero(config.n, config.n);
            st.x.diagonal() = a;
        }
    } else if (config.scheme == Scheme::DysonSDE) {
        SpectralDecomposition dec;
        dec.lambdas = a;
        dec.s = Matrix::Identity(config.n, config.n);
        dec.s_inv = dec.s;
        dec.gauge = Gauge::Trajectory;
        dec.min_gap = min_pairwise_gap(a);
        st.dec = std::move(dec);
    } else {
        st.lambdas = a;
    }

    std::vector<TrajectorySnapshot> out;
    Vector prev_order;  // eigenvalue ordering carried between snapshots
    auto snapshot = [&](long step) {
        TrajectorySnapshot snap;
        snap.step = step;
        snap.time = st.time;
        if (matrix_scheme) {
            Vector lams = eigenvalues_only(st.x);
            if (prev_order.size() == 0) {
                sort_lex(lams);
            } else {
                const auto p = match_eigenvalues(prev_order, lams);
                Vector matched(lams.size());
                for (int i = 0; i < lams.size(); ++i) matched[i] = lams[p[i]];
                lams = matched;
            }
            prev_order = lams;
            snap.lambdas = lams;
            snap.x = st.x;
        } else if (config.scheme == Scheme::DysonSDE) {
            snap.lambdas = st.dec->lambdas;
            snap.dec = st.dec;
        } else {
            snap.lambdas = st.lambdas;
        }
        out.push_back(std::move(snap));
    };

    snapshot(0);
    for (long step = 1; step <= config.steps; ++step) {
        try {
            switch (config.scheme) {
                case Scheme::MatrixBM:
                    step_matrix_bm(st, config.convention, config.dt, rng);
                    break;
                case Scheme::MatrixOU:
                    step_matrix_ou(st, config.convention, config.dt, rng);
                    break;
                case Scheme::DysonSDE: {
                    // Reject-and-redraw when the step would land inside the
                    // gap floor; the law conditioned on survival is unchanged
                    // to leading order in dt.
                    int tries = 0;
                    for (;;) {
                        const Matrix dx =
                            draw_increment(config.n, config.convention.variance_rate,
                                           config.dt, rng);
                        TrajectoryState trial = st;
                        step_dyson(trial, dx, config.dt, config.gap_floor);
                        if (trial.dec->min_gap >= config.gap_floor) {
                            st = std::move(trial);
                            break;
                        }
                        if (++tries > config.max_rejects)
                            fail(errc::gap_collapse, "step rejected too many times");
                    }
                    break;
                }
                case Scheme::Coulomb: {
                    int tries = 0;
                    for (;;) {
                        Vector trial = st.lambdas;
                        step_coulomb(trial, config.n, config.dt, config.gap_floor, rng);
                        if (min_pairwise_gap(trial) >= config.gap_floor) {
                            st.lambdas = std::move(trial);
                            break;
                        }
                        if (++tries > config.max_rejects)
                            fail(errc::gap_collapse, "step rejected too many times");
                    }
                    st.time += config.dt;
                    break;
                }
            }
        } catch (const Error& e) {
            fail(e.code(), "step " + std::to_string(step) + ": " + e.what());
        }
        if (step % config.snapshot_every == 0 || step == config.steps) snapshot(step);
    }
    return out;
}

}  // namespace gdyn
