#include "exact.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gdyn {

namespace {

struct Pole {
    double a;  // |a_i - z|^2
    int mult;
};

std::vector<Pole> poles_of(Complex z, const SourceSpec& source, int n, double tau,
                           double pole_floor_rel) {
    if (source.total() != n)
        fail(errc::invalid_argument, "source multiplicities do not sum to N");
    if (tau <= 0) fail(errc::invalid_argument, "tau must be positive");
    std::vector<Pole> poles;
    poles.reserve(source.entries.size());
    const double floor = pole_floor_rel * tau;
    for (const auto& [a, m] : source.entries) {
        const double dist2 = std::norm(a - z);
        if (dist2 < floor)
            fail(errc::pole_collision, "evaluation point within pole floor of a source value");
        poles.push_back({dist2, m});
    }
    return poles;
}

std::vector<double> pole_positions(const std::vector<Pole>& poles) {
    std::vector<double> p;
    p.reserve(poles.size());
    for (const auto& q : poles) p.push_back(q.a);
    return p;
}

template <typename F>
Complex trapezoid(const EllipseContour& c, int nodes, F&& f) {
    Complex s = 0;
    for (int k = 0; k < nodes; ++k) {
        const double th = 2.0 * M_PI * k / nodes;
        s += f(c.point(th)) * c.derivative(th);
    }
    return s / Complex(0, static_cast<double>(nodes));
}

// log prod_i (1 - beta v/(v - A_i)) as a single complex exponent; branch
// offsets of the principal log are multiples of 2 pi i and drop in exp().
Complex log_product(Complex v, double beta, const std::vector<Pole>& poles) {
    Complex L = 0;
    for (const auto& [a, m] : poles) L += static_cast<double>(m) * std::log(1.0 - beta * v / (v - a));
    return L;
}

// Contour integral of the correlator bracket at fixed beta. The analytic
// "1" part of the product integrates to zero exactly (the origin is outside
// the contour), so the product enters as (prod - 1), which also removes the
// 1/beta blow-up from the quadrature.
Complex corr_bracket(const EllipseContour& c, int nodes, double beta,
                     const std::vector<Pole>& poles, int n, double tau) {
    const Complex rate = Complex(beta * n / tau, 0);
    return trapezoid(c, nodes, [&](Complex v) {
        return std::exp(-rate * v) * expm1c(log_product(v, beta, poles)) / beta;
    });
}

// log(1 + delta) at full relative accuracy for small complex delta.
Complex log1pc(Complex delta) {
    if (std::abs(delta) < 1e-4) return delta * (1.0 - delta * (0.5 - delta / 3.0));
    return std::log(1.0 + delta);
}

// Laplacian-combined density bracket: evaluates the five-point z-stencil of
// the contour integrand in one pass. The per-point brackets each diverge like
// -sum(m)/beta with a stencil-independent coefficient; combining them under
// the integral through log-ratio differences performs that cancellation
// analytically instead of by subtraction of large values, which otherwise
// drowns the result in rounding noise once divided by h^2.
Complex density_lap_bracket(const EllipseContour& c, int nodes, double beta,
                            const std::vector<std::vector<Pole>>& poles, int n, double tau) {
    const Complex rate = Complex(beta * n / tau, 0);
    return trapezoid(c, nodes, [&](Complex v) {
        const Complex l0 = log_product(v, beta, poles[0]);
        Complex combo = 0;  // sum over neighbors of expm1(L_s - L_0)
        for (int s = 1; s < 5; ++s) {
            Complex dl = 0;
            for (size_t i = 0; i < poles[0].size(); ++i) {
                const double a0 = poles[0][i].a;
                const double as = poles[s][i].a;
                // ratio of (1 - beta v/(v - A)) factors, minus one
                const Complex delta =
                    -beta * v * (as - a0) / ((v - as) * ((1.0 - beta) * v - a0));
                dl += static_cast<double>(poles[0][i].mult) * log1pc(delta);
            }
            combo += expm1c(dl);
        }
        return std::exp(-rate * v + l0) * combo / (beta * beta * v);
    });
}

// Runs `eval(contour_nodes)` with doubling node counts until stable.
double converge_nodes(const std::function<double(int)>& eval, double tol) {
    double prev = eval(128);
    for (int nodes = 256; nodes <= 8192; nodes *= 2) {
        const double cur = eval(nodes);
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    fail(errc::quadrature_nonconverged, "contour refinement did not stabilize");
}

double log_sum_exp(const std::vector<double>& terms) {
    const double mx = *std::max_element(terms.begin(), terms.end());
    if (!std::isfinite(mx)) return mx;
    double s = 0;
    for (double t : terms) s += std::exp(t - mx);
    return mx + std::log(s);
}

}  // namespace

GammaValue upper_gamma_int(int k, double x) {
    if (k < 1) fail(errc::invalid_argument, "upper_gamma_int: k must be >= 1");
    if (x < 0) fail(errc::invalid_argument, "upper_gamma_int: x must be >= 0");
    double log_sum;
    if (x == 0) {
        log_sum = 0.0;
    } else {
        const double lx = std::log(x);
        std::vector<double> terms(k);
        for (int m = 0; m < k; ++m) terms[m] = m * lx - std::lgamma(m + 1.0);
        log_sum = log_sum_exp(terms);
    }
    const double lg = std::lgamma(static_cast<double>(k)) - x + log_sum;
    return {lg, std::exp(lg)};
}

double density_source(int n, double tau, Complex z, const SourceSpec& source,
                      const ExactOpts& opts) {
    const double h = opts.fd_step_rel * std::sqrt(tau);
    // 5-point stencil for d^2/(dz dzbar) = (1/4) Laplacian in (x, y).
    const Complex stencil[5] = {z, z + h, z - h, z + Complex(0, h), z - Complex(0, h)};
    std::vector<std::vector<Pole>> poles(5);
    std::vector<double> all_positions;
    for (int s = 0; s < 5; ++s) {
        poles[s] = poles_of(stencil[s], source, n, tau, opts.pole_floor_rel);
        const auto pos = pole_positions(poles[s]);
        all_positions.insert(all_positions.end(), pos.begin(), pos.end());
    }
    // One contour around the poles of every stencil point, so the five
    // integrands share quadrature nodes and can be combined per node.
    const auto contour = contour_around(all_positions, tau, n);

    auto eval = [&](int nodes) {
        auto integrand = [&](double beta) {
            const Complex lap = density_lap_bracket(contour, nodes, beta, poles, n, tau) / (h * h);
            return 0.25 * lap.real();
        };
        return integrate_gl(integrand, 0.0, 1.0, opts.tol_quad);
    };
    return converge_nodes(eval, opts.tol_quad) / (M_PI * n);
}

double correlator_beta_form(int n, double tau, Complex z, const SourceSpec& source,
                            const ExactOpts& opts) {
    const auto poles = poles_of(z, source, n, tau, opts.pole_floor_rel);
    const auto contour = contour_around(pole_positions(poles), tau, n);
    auto eval = [&](int nodes) {
        auto integrand = [&](double beta) {
            return corr_bracket(contour, nodes, beta, poles, n, tau).real();
        };
        return integrate_gl(integrand, 0.0, 1.0, opts.tol_quad);
    };
    const double i_val = converge_nodes(eval, opts.tol_quad);
    return i_val / (M_PI * tau * tau) + 1.0 / (M_PI * tau);
}

double correlator_double_contour(int n, double tau, Complex z, const SourceSpec& source,
                                 const ExactOpts& opts) {
    const auto poles = poles_of(z, source, n, tau, opts.pole_floor_rel);
    const auto contour = contour_around(pole_positions(poles), tau, n);
    double max_a = 0;
    for (const auto& p : poles) max_a = std::max(max_a, p.a);

    auto eval = [&](int nodes) {
        auto g_of_u = [&](double u) {
            return trapezoid(contour, nodes, [&](Complex sigma) {
                       Complex expo = -(sigma + u) * static_cast<double>(n) / tau;
                       for (const auto& [a, m] : poles)
                           expo += static_cast<double>(m) *
                                   (std::log(Complex(a + u, 0)) - std::log(a - sigma));
                       return std::exp(expo) / (sigma + u);
                   })
                .real();
        };
        // Exponentially damped tail: extend in segments until two consecutive
        // segments are negligible.
        const double seg = 2.0 * tau + max_a;
        double total = 0;
        int quiet = 0;
        for (int k = 0; k < 64; ++k) {
            const double part =
                integrate_gl(g_of_u, k * seg, (k + 1) * seg, 0.1 * opts.tol_quad);
            total += part;
            quiet = (std::abs(part) <= 0.5 * opts.tol_quad * std::max(1.0, std::abs(total)))
                        ? quiet + 1
                        : 0;
            if (quiet >= 2) return total;
        }
        fail(errc::truncation_error, "u-integral tail did not fall below tolerance");
    };
    const double i_val = converge_nodes(eval, opts.tol_quad);
    return -i_val / (M_PI * tau * tau);
}

double ginibre_closed_sum(int n, double tau, double r2) {
    if (n < 1 || tau <= 0 || r2 < 0) fail(errc::invalid_argument, "ginibre_closed_sum: bad inputs");
    const double s = n * r2 / tau;
    std::vector<double> terms(n);
    for (int m = 0; m < n; ++m) {
        const double base = (m == 0) ? 0.0 : m * std::log(s);
        terms[m] = std::log(static_cast<double>(n - m)) - std::lgamma(m + 1.0) + base;
    }
    if (s == 0.0) return std::exp(terms[0] - std::log(tau * M_PI * n));
    return std::exp(-s + log_sum_exp(terms) - std::log(tau * M_PI * n));
}

double ginibre_density_closed(int n, double tau, double r2) {
    if (n < 1 || tau <= 0 || r2 < 0)
        fail(errc::invalid_argument, "ginibre_density_closed: bad inputs");
    const double s = n * r2 / tau;
    std::vector<double> terms(n);
    for (int m = 0; m < n; ++m)
        terms[m] = (m == 0 && s == 0.0 ? 0.0 : m * std::log(s)) - std::lgamma(m + 1.0);
    const double lse = (s == 0.0) ? 0.0 : log_sum_exp(terms);
    return std::exp(-s + lse) / (M_PI * tau);
}

bool spiric_inside(double tau, Complex a, Complex z) {
    if (tau <= 0) fail(errc::invalid_argument, "spiric_inside: tau must be positive");
    const double ap = std::norm(a + z);
    const double am = std::norm(a - z);
    return 0.5 * tau * (ap + am) >= ap * am;
}

}  // namespace gdyn
