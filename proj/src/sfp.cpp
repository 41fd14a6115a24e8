#include "sfp.hpp"

#include <cmath>

#include "integrators.hpp"

namespace gdyn {

namespace {

// Sum over k != i of 1/(lambda_i - lambda_k); the dlog of the repulsion factor.
Vector gap_sums(const Vector& lam) {
    const int n = static_cast<int>(lam.size());
    Vector g = Vector::Zero(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (k != i) g[i] += 1.0 / (lam[i] - lam[k]);
    return g;
}

}  // namespace

SfpPoint make_sfp_point(const Vector& lambdas, const Matrix& s) {
    SfpPoint p;
    p.dec.lambdas = lambdas;
    p.dec.s = s;
    p.dec.s_inv = s.partialPivLu().inverse();
    p.dec.gauge = Gauge::Trajectory;
    p.dec.min_gap = min_pairwise_gap(lambdas);
    p.a = s.adjoint() * s;
    p.a_inv = p.a.partialPivLu().inverse();
    p.o = p.a_inv.cwiseProduct(p.a.transpose());
    return p;
}

SfpPoint sample_sfp_point(int n, Rng& rng, double max_cond) {
    for (;;) {
        Vector lam(n);
        for (int i = 0; i < n; ++i) {
            const double r = std::sqrt(rng.uniform());
            const double th = 2 * M_PI * rng.uniform();
            lam[i] = Complex(r * std::cos(th), r * std::sin(th));
        }
        if (min_pairwise_gap(lam) <= 1e-3) continue;
        Matrix s(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s(i, j) = rng.normal_complex();
        Eigen::JacobiSVD<Matrix> svd(s);
        const auto& sv = svd.singularValues();
        if (sv[sv.size() - 1] <= 0 || sv[0] / sv[sv.size() - 1] >= max_cond) continue;
        return make_sfp_point(lam, s);
    }
}

Complex coef_lambda_lambda(const SfpPoint& p, int i, int j) { return p.a_inv(i, j) * p.a(j, i); }

Complex coef_s_lambda(const SfpPoint& p, int i, int k, int l) {
    Complex c = 0;
    for (int n = 0; n < p.dec.n(); ++n)
        if (n != l)
            c += p.dec.s(k, n) * p.a(i, l) * p.a_inv(n, i) / (p.dec.lambdas[l] - p.dec.lambdas[n]);
    return c;
}

Complex coef_lambda_sbar(const SfpPoint& p, int i, int k, int l) {
    Complex c = 0;
    for (int n = 0; n < p.dec.n(); ++n)
        if (n != l)
            c += std::conj(p.dec.s(k, n)) * p.a(l, i) * p.a_inv(i, n) /
                 std::conj(p.dec.lambdas[l] - p.dec.lambdas[n]);
    return c;
}

Complex coef_s_sbar(const SfpPoint& p, int k, int l, int n, int m) {
    Complex c = 0;
    for (int al = 0; al < p.dec.n(); ++al) {
        if (al == l) continue;
        for (int be = 0; be < p.dec.n(); ++be) {
            if (be == m) continue;
            c += p.dec.s(k, al) * std::conj(p.dec.s(n, be)) * p.a(m, l) * p.a_inv(al, be) /
                 ((p.dec.lambdas[l] - p.dec.lambdas[al]) *
                  std::conj(p.dec.lambdas[m] - p.dec.lambdas[be]));
        }
    }
    return c;
}

double check_derivative_ids(const SfpPoint& p, double fd_step) {
    const int n = p.dec.n();
    const Matrix sd_inv = p.dec.s.adjoint().partialPivLu().inverse();

    // Wirtinger derivative of A and A^{-1} in S_kl by centered differences
    // with one Richardson step.
    auto fd_pair = [&](int k, int l, double h, Matrix& d_s_a, Matrix& d_sb_a, Matrix& d_s_ai,
                       Matrix& d_sb_ai) {
        auto eval = [&](Complex bump, Matrix& a_out, Matrix& ai_out) {
            Matrix s = p.dec.s;
            s(k, l) += bump;
            a_out = s.adjoint() * s;
            ai_out = a_out.partialPivLu().inverse();
        };
        Matrix axp, aixp, axm, aixm, ayp, aiyp, aym, aiym;
        eval(Complex(h, 0), axp, aixp);
        eval(Complex(-h, 0), axm, aixm);
        eval(Complex(0, h), ayp, aiyp);
        eval(Complex(0, -h), aym, aiym);
        const Matrix dax = (axp - axm) / (2 * h), day = (ayp - aym) / (2 * h);
        const Matrix daix = (aixp - aixm) / (2 * h), daiy = (aiyp - aiym) / (2 * h);
        d_s_a = 0.5 * (dax - Complex(0, 1) * day);
        d_sb_a = 0.5 * (dax + Complex(0, 1) * day);
        d_s_ai = 0.5 * (daix - Complex(0, 1) * daiy);
        d_sb_ai = 0.5 * (daix + Complex(0, 1) * daiy);
    };

    double worst = 0;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            Matrix a1, b1, c1, d1, a2, b2, c2, d2;
            fd_pair(k, l, fd_step, a1, b1, c1, d1);
            fd_pair(k, l, fd_step / 2, a2, b2, c2, d2);
            const Matrix d_s_a = (4 * a2 - a1) / 3;
            const Matrix d_sb_a = (4 * b2 - b1) / 3;
            const Matrix d_s_ai = (4 * c2 - c1) / 3;
            const Matrix d_sb_ai = (4 * d2 - d1) / 3;
            for (int al = 0; al < n; ++al)
                for (int be = 0; be < n; ++be) {
                    const Complex pred_s_a = (l == be) ? std::conj(p.dec.s(k, al)) : Complex(0);
                    const Complex pred_sb_a = (l == al) ? p.dec.s(k, be) : Complex(0);
                    const Complex pred_s_ai = -p.dec.s_inv(al, k) * p.a_inv(l, be);
                    const Complex pred_sb_ai = -p.a_inv(al, l) * sd_inv(k, be);
                    worst = std::max({worst, std::abs(d_s_a(al, be) - pred_s_a),
                                      std::abs(d_sb_a(al, be) - pred_sb_a),
                                      std::abs(d_s_ai(al, be) - pred_s_ai),
                                      std::abs(d_sb_ai(al, be) - pred_sb_ai)});
                }
        }
    return worst;
}

double check_TQ(const SfpPoint& p) {
    const int n = p.dec.n();
    const Vector& lam = p.dec.lambdas;
    const Vector g = gap_sums(lam);

    // Term 1: sum_ij O_ij d^2F/(dlam_i dlambar_j), divided by F.
    Complex t1 = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t1 += p.o(i, j) * 4.0 * g[i] * std::conj(g[j]);

    // Terms 2 and 3: derivative sums of the mixed coefficients, evaluated
    // from un-collapsed matrix products so the derivative identities are
    // exercised rather than assumed.
    const Matrix prod_left = p.dec.s.adjoint() * p.dec.s;                  // = A
    const Matrix unit_dag = p.dec.s.adjoint() * p.dec.s.adjoint().partialPivLu().inverse();
    const Matrix unit = p.dec.s_inv * p.dec.s;                             // = I
    Complex t2 = 0, t3 = 0;
    for (int i = 0; i < n; ++i) {
        Complex inner = 0;
        for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m) {
                if (m == l) continue;
                inner += (prod_left(m, i) * p.a_inv(i, m) -
                          unit_dag(m, m) * p.a(l, i) * p.a_inv(i, l)) /
                         std::conj(lam[l] - lam[m]);
            }
        t2 += 2.0 * g[i] * inner;
    }
    for (int j = 0; j < n; ++j) {
        Complex inner = 0;
        for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m) {
                if (m == l) continue;
                inner += (prod_left(j, m) * p.a_inv(m, j) -
                          unit(m, m) * p.a(j, l) * p.a_inv(l, j)) /
                         (lam[l] - lam[m]);
            }
        t3 += 2.0 * std::conj(g[j]) * inner;
    }

    // Term 4: full quadruple sum of the second S-derivative of the S-Sbar
    // coefficient before any antisymmetry collapse.
    Complex t4 = 0;
    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
            for (int al = 0; al < n; ++al) {
                if (al == l) continue;
                for (int be = 0; be < n; ++be) {
                    if (be == m) continue;
                    const Complex num = p.o(al, be) - p.a(be, l) * p.a_inv(l, be) -
                                        p.a(m, al) * p.a_inv(al, m) + p.a(m, l) * p.a_inv(l, m);
                    t4 += num / ((lam[l] - lam[al]) * std::conj(lam[m] - lam[be]));
                }
            }

    const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4), 1e-300});
    return std::abs(t1 + t2 + t3 + t4) / scale;
}

std::pair<double, double> check_TdQ(const SfpPoint& p) {
    const int n = p.dec.n();
    const Vector& lam = p.dec.lambdas;
    const Vector g = gap_sums(lam);
    const Matrix prod_left = p.dec.s.adjoint() * p.dec.s;  // = A by definition
    const Matrix unit = p.dec.s_inv * p.dec.s;             // = I numerically

    double worst1 = 0;
    for (int j = 0; j < n; ++j) {
        Complex term_a = 0;
        for (int i = 0; i < n; ++i) term_a += coef_lambda_lambda(p, i, j) * 2.0 * g[i];
        Complex term_b = 0;  // sum_kl d/dS_kl of the S-lambdabar coefficient
        for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m) {
                if (m == l) continue;
                term_b += (prod_left(j, m) * p.a_inv(m, j) -
                           unit(m, m) * p.a(j, l) * p.a_inv(l, j)) /
                          (lam[l] - lam[m]);
            }
        const double scale = std::max({std::abs(term_a), std::abs(term_b), 1e-300});
        worst1 = std::max(worst1, std::abs(term_a + term_b) / scale);
    }

    double worst2 = 0;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            Complex term_a = 0;
            for (int i = 0; i < n; ++i)
                term_a += coef_s_lambda(p, i, k, l) * 2.0 * std::conj(g[i]);
            Complex term_b = 0;  // sum_nm d/dSbar_nm of the S-Sbar coefficient
            for (int m = 0; m < n; ++m)
                for (int al = 0; al < n; ++al) {
                    if (al == l) continue;
                    for (int be = 0; be < n; ++be) {
                        if (be == m) continue;
                        term_b += p.dec.s(k, al) *
                                  (prod_left(be, l) * p.a_inv(al, be) -
                                   p.a(m, l) * p.a_inv(al, m)) /
                                  ((lam[l] - lam[al]) * std::conj(lam[m] - lam[be]));
                    }
                }
            const double scale = std::max({std::abs(term_a), std::abs(term_b), 1e-300});
            worst2 = std::max(worst2, std::abs(term_a + term_b) / scale);
        }
    return {worst1, worst2};
}

double check_covariances(const SfpPoint& p, long n_draws, double dt, Rng& rng) {
    if (n_draws < 10000) fail(errc::invalid_argument, "check_covariances: need >= 1e4 draws");
    const int n = p.dec.n();
    const Vector& lam = p.dec.lambdas;

    struct Acc {
        Complex sum = 0;
        double sq_re = 0, sq_im = 0;
        void add(Complex v) {
            sum += v;
            sq_re += v.real() * v.real();
            sq_im += v.imag() * v.imag();
        }
    };
    std::vector<Acc> acc_ll(n * n), acc_sl(n * n * n), acc_ss(n * n * n * n);

    Vector dlam(n);
    Matrix ds(n, n);
    for (long d = 0; d < n_draws; ++d) {
        const Matrix dx = draw_increment(n, 1.0, dt, rng);
        const Matrix delta = p.dec.s_inv * dx * p.dec.s;
        for (int i = 0; i < n; ++i) dlam[i] = delta(i, i);
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                Complex v = 0;
                for (int j = 0; j < n; ++j)
                    if (j != l) v += p.dec.s(k, j) * delta(j, l) / (lam[l] - lam[j]);
                ds(k, l) = v;
            }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) acc_ll[i * n + j].add(dlam[i] * std::conj(dlam[j]));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    acc_sl[(i * n + k) * n + l].add(ds(k, l) * std::conj(dlam[i]));
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m)
                    for (int q = 0; q < n; ++q)
                        acc_ss[((k * n + l) * n + m) * n + q].add(ds(k, l) *
                                                                  std::conj(ds(m, q)));
    }

    double worst = 0;
    auto compare = [&](const Acc& a, Complex pred) {
        const Complex mean = a.sum / static_cast<double>(n_draws);
        const double var_re =
            std::max(0.0, a.sq_re / n_draws - mean.real() * mean.real());
        const double var_im =
            std::max(0.0, a.sq_im / n_draws - mean.imag() * mean.imag());
        const double se = std::sqrt((var_re + var_im) / n_draws) + 1e-300;
        worst = std::max(worst, std::abs(mean - pred) / se);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) compare(acc_ll[i * n + j], coef_lambda_lambda(p, i, j) * dt);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                compare(acc_sl[(i * n + k) * n + l], coef_s_lambda(p, i, k, l) * dt);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m)
                for (int q = 0; q < n; ++q)
                    compare(acc_ss[((k * n + l) * n + m) * n + q],
                            coef_s_sbar(p, k, l, m, q) * dt);
    return worst;
}

namespace {

// 12 real coordinates of the N = 2 point: (Re, Im) of lambda_0, lambda_1,
// S_00, S_01, S_10, S_11.
constexpr int kQCoords = 12;

double q_kernel(const double* c, double t, const Matrix& x0) {
    Vector lam(2);
    lam[0] = Complex(c[0], c[1]);
    lam[1] = Complex(c[2], c[3]);
    Matrix s(2, 2);
    s(0, 0) = Complex(c[4], c[5]);
    s(0, 1) = Complex(c[6], c[7]);
    s(1, 0) = Complex(c[8], c[9]);
    s(1, 1) = Complex(c[10], c[11]);
    const Matrix x = s * lam.asDiagonal() * s.partialPivLu().inverse();
    const double dist2 = (x - x0).squaredNorm();
    return std::exp(-dist2 / t) / std::pow(t, 4.0);
}

double q_residual_at_step(const SfpPoint& p, double t, const Matrix& x0, double h) {
    double c0[kQCoords] = {
        p.dec.lambdas[0].real(), p.dec.lambdas[0].imag(), p.dec.lambdas[1].real(),
        p.dec.lambdas[1].imag(), p.dec.s(0, 0).real(),    p.dec.s(0, 0).imag(),
        p.dec.s(0, 1).real(),    p.dec.s(0, 1).imag(),    p.dec.s(1, 0).real(),
        p.dec.s(1, 0).imag(),    p.dec.s(1, 1).real(),    p.dec.s(1, 1).imag()};
    auto f = [&](int a, double da, int b, double db) {
        double c[kQCoords];
        std::copy(c0, c0 + kQCoords, c);
        c[a] += da;
        if (b >= 0) c[b] += db;
        return q_kernel(c, t, x0);
    };
    const double f0 = q_kernel(c0, t, x0);

    Eigen::Matrix<double, kQCoords, kQCoords> hess;
    for (int a = 0; a < kQCoords; ++a) {
        hess(a, a) = (f(a, h, -1, 0) - 2 * f0 + f(a, -h, -1, 0)) / (h * h);
        for (int b = a + 1; b < kQCoords; ++b) {
            hess(a, b) = (f(a, h, b, h) - f(a, h, b, -h) - f(a, -h, b, h) + f(a, -h, b, -h)) /
                         (4 * h * h);
            hess(b, a) = hess(a, b);
        }
    }
    // d_u d_vbar f = (1/4)[(H_xx + H_yy) + i(H_xy - H_yx)] with u holomorphic
    // in the first slot and v conjugated in the second.
    auto mixed = [&](int u, int v) {
        const int xu = 2 * u, yu = 2 * u + 1, xv = 2 * v, yv = 2 * v + 1;
        return 0.25 * Complex(hess(xu, xv) + hess(yu, yv), hess(xu, yv) - hess(yu, xv));
    };
    auto svar = [](int k, int l) { return 2 + 2 * k + l; };

    Complex rhs = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) rhs += coef_lambda_lambda(p, i, j) * mixed(i, j);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                rhs += coef_lambda_sbar(p, i, k, l) * mixed(i, svar(k, l));
                rhs += coef_s_lambda(p, i, k, l) * mixed(svar(k, l), i);
            }
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
            for (int m = 0; m < 2; ++m)
                for (int q = 0; q < 2; ++q)
                    rhs += coef_s_sbar(p, k, l, m, q) * mixed(svar(k, l), svar(m, q));

    const Matrix x = reconstruct(p.dec);
    const double dist2 = (x - x0).squaredNorm();
    const double lhs = f0 * (-4.0 / t + dist2 / (t * t));  // analytic d_t of the kernel
    // normalize by the scale of the terms, not |lhs|, which has a zero at
    // dist2 = 4t where the relative residual would be meaningless
    const double scale = f0 * (4.0 / t + dist2 / (t * t));
    return (std::abs(lhs - rhs.real()) + std::abs(rhs.imag())) / std::max(scale, 1e-300);
}

}  // namespace

double check_Q_solution(double t, const SfpPoint& p, const Matrix& x0, double fd_step) {
    if (p.dec.n() != 2) fail(errc::invalid_argument, "check_Q_solution: N = 2 only");
    if (t < 0.1) fail(errc::invalid_argument, "check_Q_solution: t must be >= 0.1");
    const double r1 = q_residual_at_step(p, t, x0, fd_step);
    const double r2 = q_residual_at_step(p, t, x0, fd_step / 2);
    // Second-order scheme: halving the step should not grow the residual.
    if (r2 > 2 * r1 && r2 > 1e-3)
        fail(errc::step_too_large, "check_Q_solution: finite-difference step unreliable");
    return r2;
}

}  // namespace gdyn
