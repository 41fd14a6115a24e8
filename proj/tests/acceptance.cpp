// Acceptance gate: one line per criterion, exit 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "app.hpp"
#include "sfp.hpp"

using namespace gdyn;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, double value, double bound, double seconds) {
    std::printf("criterion %2d  %-34s %s  (value=%.4g, bound=%.4g, %.1fs)\n", idx, name,
                pass ? "PASS" : "FAIL", value, bound, seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

Matrix ginibre_matrix(int n, double entry_sd, Rng& rng) {
    Matrix x(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) = entry_sd * rng.normal_complex();
    return x;
}

// 1. Overlap algebra on random decompositions.
void criterion_1() {
    Timer tm;
    Rng rng(101);
    double worst_sum = 0, worst_diag = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 49);  // 2..50
        const auto dec = eigendecompose(ginibre_matrix(n, 1.0 / std::sqrt(n), rng));
        const auto ov = overlap_matrix(dec);
        for (int j = 0; j < n; ++j) {
            Complex colsum = 0;
            for (int i = 0; i < n; ++i) colsum += ov.o(i, j);
            worst_sum = std::max(worst_sum, std::abs(colsum - 1.0));
            worst_diag = std::max(worst_diag, 1.0 - ov.diag_real[j]);
        }
    }
    const double worst = std::max(worst_sum, worst_diag);
    report(1, "overlap sum rule / diagonal bound", worst < 1e-10, worst, 1e-10, tm.seconds());
}

// 2. One-step Ito covariances vs closed forms.
void criterion_2() {
    Timer tm;
    Rng rng(102);
    double worst_sigma = 0;
    for (int k = 0; k < 20; ++k) {
        const int n = (k % 2 == 0) ? 2 : 3;
        const SfpPoint p = sample_sfp_point(n, rng);
        worst_sigma = std::max(worst_sigma, check_covariances(p, 100000, 1e-4, rng));
    }
    report(2, "Ito covariances (4 sigma)", worst_sigma < 4.0, worst_sigma, 4.0, tm.seconds());
}

// 3. Shared-noise eigenvector integrator vs direct diagonalization, O(dt).
void criterion_3() {
    Timer tm;
    const int n = 8;
    Vector a0(n);
    for (int i = 0; i < n; ++i) a0[i] = std::polar(1.0, 2.0 * M_PI * i / n);
    Rng srng(103);
    Matrix s0 = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s0(i, j) += 0.3 * srng.normal_complex();
    const SfpPoint point = make_sfp_point(a0, s0);
    const Matrix x_before = reconstruct(point.dec);
    auto mismatch = [&](double dt, Rng& r) {
        TrajectoryState st;
        st.dec = point.dec;
        const Matrix dx = draw_increment(n, 1.0, dt, r);
        step_dyson(st, dx, dt, 1e-12);
        const auto direct = eigendecompose(x_before + dx, 1e-12);
        const auto perm = match_eigenvalues(st.dec->lambdas, direct.lambdas);
        double worst = 0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(st.dec->lambdas[i] - direct.lambdas[perm[i]]));
        return worst;
    };
    double m1 = 0, m2 = 0;
    for (int k = 0; k < 20; ++k) {
        Rng shared(103, 10 + k), shared2(103, 10 + k);
        m1 += mismatch(1e-3, shared) / 20;
        m2 += mismatch(1e-4, shared2) / 20;
    }
    const double order = std::log10(m1 / m2);
    report(3, "integrator equivalence order", order >= 1.0, order, 1.0, tm.seconds());
}

// 4. Coulomb gas and matrix OU both reach the semicircle (KS < 0.05).
void criterion_4() {
    Timer tm;
    Fig1Opts opts;
    opts.n = 100;
    opts.steps = 3000;
    opts.dt = 1e-3;
    opts.seed = 104;
    const fs::path dir = fs::temp_directory_path() / "gdyn_acceptance_fig1";
    fs::remove_all(dir);
    opts.common.out_dir = dir.string();
    cmd_compare_fig1(opts);
    std::ifstream in(dir / "manifest.json");
    const auto man = nlohmann::json::parse(in);
    const double ks_c = std::stod(man["config"]["ks_semicircle_coulomb"].get<std::string>());
    const double ks_m = std::stod(man["config"]["ks_semicircle_matrix_ou"].get<std::string>());
    fs::remove_all(dir);
    const double worst = std::max(ks_c, ks_m);
    report(4, "Fig.1 semicircle (KS)", worst < 0.05, worst, 0.05, tm.seconds());
}

// 5. Operator cancellation identities and derivative identities.
void criterion_5() {
    Timer tm;
    Rng rng(105);
    double worst = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const SfpPoint p = sample_sfp_point(2 + rep % 5, rng);
        worst = std::max(worst, check_TQ(p));
        const auto [b1, b2] = check_TdQ(p);
        worst = std::max({worst, b1, b2});
    }
    double worst_fd = 0;
    for (int rep = 0; rep < 50; ++rep)
        worst_fd = std::max(worst_fd, check_derivative_ids(sample_sfp_point(2 + rep % 5, rng)));
    const bool pass = worst < 1e-10 && worst_fd < 1e-6;
    report(5, "operator identities", pass, std::max(worst, worst_fd * 1e-4), 1e-10,
           tm.seconds());
}

// 6. N = 2 transition kernel solves the evolution equation, residual O(h^2).
void criterion_6() {
    Timer tm;
    Rng rng(106);
    double worst = 0, sum_r = 0, sum_r_half = 0;
    for (int rep = 0; rep < 10; ++rep) {
        // well-conditioned eigenvectors and a healthy gap keep the kernel
        // resolvable by the FD step
        SfpPoint p = sample_sfp_point(2, rng, 4.0);
        while (p.dec.min_gap < 0.3) p = sample_sfp_point(2, rng, 4.0);
        Matrix x0 = reconstruct(p.dec);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) x0(i, j) += 0.3 * rng.normal_complex();
        // steps large enough that h^2 truncation dominates eps/h^2 rounding,
        // so the halving ratio actually measures the order
        const double r = check_Q_solution(0.5, p, x0, 8e-4);
        const double r_half = check_Q_solution(0.5, p, x0, 4e-4);
        worst = std::max(worst, r);
        // aggregate decay ratio: individual points can have accidentally tiny
        // truncation constants where the per-point ratio is meaningless
        sum_r += r;
        sum_r_half += r_half;
    }
    const bool pass = worst < 1e-4 && sum_r / sum_r_half > 2.5;
    report(6, "transition kernel residual", pass, worst, 1e-4, tm.seconds());
}

// 7. Characteristic polynomial: N x N vs 2N x 2N determinant forms.
void criterion_7() {
    Timer tm;
    Rng rng(107);
    double worst = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + rep % 7;  // 2..8
        const Matrix x = ginibre_matrix(n, 1.0 / std::sqrt(n), rng);
        const Complex z(rng.normal() * 0.5, rng.normal() * 0.5);
        const Complex w(rng.normal() * 0.5, rng.normal() * 0.5);
        const double a = ecp_value(x, z, w);
        const double b = ecp_block_value(x, z, w);
        worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    report(7, "determinant identity", worst < 1e-8, worst, 1e-8, tm.seconds());
}

// 8. Heat equation for <D>: scalar oracle plus N = 3 Monte Carlo.
void criterion_8() {
    Timer tm;
    // N = 1 the residual of the analytic mean is identically zero:
    // <D> = |z - a|^2 + t + |w|^2, d_t<D> = 1 = d_w d_wbar <D>.
    // Monte Carlo at N = 1 must therefore be pure noise, as must N = 3.
    double worst_sigma = 0;
    for (int n : {1, 3}) {
        SimConfig cfg;
        cfg.n = n;
        cfg.scheme = Scheme::MatrixBM;
        cfg.dt = 1e-2;
        cfg.seed = 108 + n;
        cfg.source = SourceSpec::ginibre(n);
        const std::vector<double> w = {0.4, 0.6, 0.8, 1.0, 1.2};
        const std::vector<double> t = {0.1, 0.15, 0.2, 0.25, 0.3};
        const auto hr = ecp_heat_residual(cfg, Complex(0.3, 0.2), w, t, 10000);
        for (size_t i = 0; i < hr.residual.size(); ++i)
            worst_sigma = std::max(worst_sigma, std::abs(hr.residual[i]) / hr.stderrs[i]);
    }
    report(8, "heat equation (3 sigma)", worst_sigma < 3.0, worst_sigma, 3.0, tm.seconds());
}

// 9. Three representations of the correlator agree pairwise.
void criterion_9() {
    Timer tm;
    double worst = 0;
    // centers at +/-0.2, +/-0.6, 1.0 in each coordinate: away from the source
    // atoms, and far enough from the origin that the double-contour residue
    // extraction (amplification ~ (tau/|a-z|^2)^mult) stays well conditioned
    const Window win{-0.8, 1.2, -0.8, 1.2};
    FieldGrid grid(win, 5, 5);
    for (int n : {2, 4, 8}) {
        const auto null_src = SourceSpec::ginibre(n);
        for (int iy = 0; iy < 5; ++iy)
            for (int ix = 0; ix < 5; ++ix) {
                const Complex z = grid.center(ix, iy);
                const double b = correlator_beta_form(n, 0.8, z, null_src);
                const double d = correlator_double_contour(n, 0.8, z, null_src);
                const double c = ginibre_closed_sum(n, 0.8, std::norm(z));
                worst = std::max({worst, std::abs(b - d), std::abs(b - c), std::abs(d - c)});
            }
        if (n % 2 == 0) {
            const auto sp = SourceSpec::spiric(Complex(0.6, 0.1), n);
            for (int iy = 0; iy < 5; ++iy)
                for (int ix = 0; ix < 5; ++ix) {
                    const Complex z = grid.center(ix, iy);
                    const double b = correlator_beta_form(n, 0.8, z, sp);
                    const double d = correlator_double_contour(n, 0.8, z, sp);
                    worst = std::max(worst, std::abs(b - d));
                }
        }
    }
    report(9, "representation equivalence", worst < 1e-6, worst, 1e-6, tm.seconds());
}

// 10. d_tau rho = d_z d_zbar O on exact finite-N fields, second order in h.
void criterion_10() {
    Timer tm;
    const Window win{-0.6, 0.6, -0.6, 0.6};
    auto build = [&](double h, int gg) {
        std::vector<double> taus = {1.0 - h, 1.0, 1.0 + h};
        std::vector<FieldGrid> rho, o;
        for (double tau : taus) {
            FieldGrid r(win, gg, gg), oo(win, gg, gg);
            for (int iy = 0; iy < gg; ++iy)
                for (int ix = 0; ix < gg; ++ix) {
                    const double r2 = std::norm(r.center(ix, iy));
                    r.at(ix, iy) = ginibre_density_closed(4, tau, r2);
                    oo.at(ix, iy) = ginibre_closed_sum(4, tau, r2);
                }
            rho.push_back(std::move(r));
            o.push_back(std::move(oo));
        }
        const auto res = hierarchy_residual(taus, rho, o);
        double worst = 0;
        for (double v : res[0].values) worst = std::max(worst, std::abs(v));
        return worst;
    };
    // Halve the tau step and the grid spacing together; the observed order
    // approaches 2 from below (1.9977 at this pair), so gate at 1.95.
    const double r2 = build(0.025, 36);
    const double r3 = build(0.0125, 72);
    const double order = std::log2(r2 / r3);
    // Ginibre bulk closed forms satisfy the identity exactly on the stencil.
    const double tau = 1.0;
    FieldGrid o_bulk(win, 9, 9);
    for (int iy = 0; iy < 9; ++iy)
        for (int ix = 0; ix < 9; ++ix)
            o_bulk.at(ix, iy) = (tau - std::norm(o_bulk.center(ix, iy))) / (M_PI * tau * tau);
    const double cx = 1.0 / (o_bulk.dx() * o_bulk.dx());
    const double cy = 1.0 / (o_bulk.dy() * o_bulk.dy());
    double worst_bulk = 0;
    for (int iy = 1; iy + 1 < 9; ++iy)
        for (int ix = 1; ix + 1 < 9; ++ix) {
            const double lap =
                cx * (o_bulk.at(ix + 1, iy) - 2 * o_bulk.at(ix, iy) + o_bulk.at(ix - 1, iy)) +
                cy * (o_bulk.at(ix, iy + 1) - 2 * o_bulk.at(ix, iy) + o_bulk.at(ix, iy - 1));
            worst_bulk = std::max(worst_bulk, std::abs(0.25 * lap + 1.0 / (M_PI * tau * tau)));
        }
    const bool pass = order >= 1.95 && r3 < 4e-4 && worst_bulk < 1e-12;
    report(10, "hierarchy residual order", pass, order, 1.95, tm.seconds());
}

// 11. Monte Carlo eigenvector correlator vs the exact value at the origin.
void criterion_11() {
    Timer tm;
    const int n = 2;
    const double tau = 1.0, t = tau / n;
    const long m = 100000;
    std::vector<WeightedSample> samples(m);
    parallel_for(m, [&](long k) {
        Rng rng(111, static_cast<uint64_t>(k));
        const auto dec = eigendecompose(ginibre_matrix(n, std::sqrt(t), rng));
        const auto ov = overlap_matrix(dec);
        samples[k] = {dec.lambdas, ov.diag_real};
    });
    const Window win{-0.25, 0.25, -0.25, 0.25};
    const auto g = estimate_O1(samples, win, 5, 5);
    const double mc = g.at(2, 2), se = g.se(2, 2);
    const double exact = ginibre_closed_sum(n, tau, 0.0);  // 1/(pi tau)
    const double sigma = std::abs(mc - exact) / se;
    report(11, "Monte Carlo vs exact correlator", sigma < 3.0, sigma, 3.0, tm.seconds());
}

// 12. Bulk law emerges from the closed sum as N grows.
void criterion_12() {
    Timer tm;
    const double tau = 1.0;
    double prev = 1e9, worst_at_400 = 0;
    bool monotone = true;
    for (int n : {50, 100, 200, 400}) {
        double dev = 0;
        for (double r = 0.0; r <= 0.7 * std::sqrt(tau) + 1e-12; r += 0.07) {
            const double exact = ginibre_closed_sum(n, tau, r * r);
            const double bulk = (tau - r * r) / (M_PI * tau * tau);
            dev = std::max(dev, std::abs(exact / bulk - 1.0));
        }
        // convergence is superexponential in the bulk; once the deviation
        // reaches the rounding floor, ordering between N values is noise
        monotone = monotone && (dev < prev || dev < 1e-10);
        prev = dev;
        if (n == 400) worst_at_400 = dev;
    }
    report(12, "macroscopic law convergence", monotone && worst_at_400 < 0.05, worst_at_400,
           0.05, tm.seconds());
}

// 13. Edge law at N = 400 plus the collision-law reduction identity.
void criterion_13() {
    Timer tm;
    const int n = 400;
    const double tau = 1.0, rn = std::sqrt(static_cast<double>(n));
    double worst = 0;
    for (double d = -3.0; d <= 3.0 + 1e-12; d += 0.05) {
        // distance to the edge in the |z|^2 scaling variable
        const double r2 = tau + 2.0 * std::sqrt(tau) * d / rn;
        const double exact = rn * ginibre_closed_sum(n, tau, r2);
        const double law = edge_micro_law(d, tau);
        worst = std::max(worst, std::abs(exact - law));
    }
    double worst_id = 0;
    for (double d = -3.0; d <= 3.0 + 1e-12; d += 0.25) {
        const double via_collision =
            collision_micro_law(Complex(0, 0), -2.0 * d * std::sqrt(tau),
                                Complex(std::sqrt(tau), 0));
        worst_id = std::max(worst_id, std::abs(via_collision - edge_micro_law(d, tau)));
    }
    const double bound = 0.02 / (M_PI * tau);
    const bool pass = worst < bound && worst_id < 1e-12;
    report(13, "edge universality", pass, worst, bound, tm.seconds());
}

// 14. Support topology flips from two components to one at tau_c = |a|^2.
void criterion_14() {
    Timer tm;
    const Complex a(0.8, 0.0);
    const double tau_c = std::norm(a);
    auto components = [&](double tau) {
        const int g = 200;
        std::vector<char> inside(g * g), seen(g * g, 0);
        for (int iy = 0; iy < g; ++iy)
            for (int ix = 0; ix < g; ++ix) {
                const Complex z(-1.5 + 3.0 * (ix + 0.5) / g, -1.5 + 3.0 * (iy + 0.5) / g);
                inside[ix + g * iy] = spiric_inside(tau, a, z) ? 1 : 0;
            }
        int comps = 0;
        std::vector<int> stack;
        for (int start = 0; start < g * g; ++start) {
            if (!inside[start] || seen[start]) continue;
            ++comps;
            stack.push_back(start);
            seen[start] = 1;
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                const int ix = cur % g, iy = cur / g;
                const int nb[4] = {cur - 1, cur + 1, cur - g, cur + g};
                const bool ok[4] = {ix > 0, ix + 1 < g, iy > 0, iy + 1 < g};
                for (int q = 0; q < 4; ++q)
                    if (ok[q] && inside[nb[q]] && !seen[nb[q]]) {
                        seen[nb[q]] = 1;
                        stack.push_back(nb[q]);
                    }
            }
        }
        return comps;
    };
    const int before = components(0.9 * tau_c);
    const int after = components(1.1 * tau_c);
    const bool pass = before == 2 && after == 1;
    report(14, "support topology change", pass, before * 10 + after, 21, tm.seconds());
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    criterion_13();
    criterion_14();
    if (g_failures) {
        std::printf("%d criteria FAILED\n", g_failures);
        return 1;
    }
    std::printf("all 14 criteria passed\n");
    return 0;
}
