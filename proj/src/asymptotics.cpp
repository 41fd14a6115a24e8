#include "asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "exact.hpp"

namespace gdyn {

SaddleResult solve_min_saddle(double tau, Complex z, const SourceSpec& source) {
    if (tau <= 0) fail(errc::invalid_argument, "solve_min_saddle: tau must be positive");
    const int n = source.total();
    std::vector<std::pair<double, int>> poles;
    double min_a = std::numeric_limits<double>::infinity();
    for (const auto& [a, m] : source.entries) {
        const double d2 = std::norm(a - z);
        poles.emplace_back(d2, m);
        min_a = std::min(min_a, d2);
    }
    auto g = [&](double sigma) {
        double s = -1.0 / tau;
        for (const auto& [a, m] : poles) s += static_cast<double>(m) / (n * (a - sigma));
        return s;
    };
    auto gp = [&](double sigma) {
        double s = 0;
        for (const auto& [a, m] : poles) {
            const double d = a - sigma;
            s += static_cast<double>(m) / (n * d * d);
        }
        return s;
    };

    const double eps = 1e-12 * (1.0 + std::abs(min_a));
    double hi = min_a - eps;
    double lo = min_a - 2.0 * n * tau - 1.0;
    while (g(lo) >= 0) lo = min_a - 2.0 * (min_a - lo);  // g -> -1/tau at -inf
    if (g(hi) <= 0) {
        // Root squeezed against min_a at machine precision.
        return {hi, true, 0};
    }

    SaddleResult res;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        ++res.iterations;
        const double gx = g(x);
        if (std::abs(gx) < 1e-13 && hi - lo < 1e-10 * (1.0 + std::abs(x))) break;
        if (gx > 0)
            hi = x;
        else
            lo = x;
        const double step = gx / gp(x);
        double next = x - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // keep the bracket
        if (std::abs(next - x) < 1e-16 * (1.0 + std::abs(x))) {
            x = next;
            break;
        }
        x = next;
    }
    res.sigma_min = x;
    res.converged = std::abs(g(x)) < 1e-12;
    return res;
}

double macro_O(double tau, Complex z, const SourceSpec& source) {
    const double sigma = solve_min_saddle(tau, z, source).sigma_min;
    return sigma < 0 ? -sigma / (M_PI * tau * tau) : 0.0;
}

double edge_micro_law(double delta, double tau) {
    if (tau <= 0) fail(errc::invalid_argument, "edge_micro_law: tau must be positive");
    const double rt = std::sqrt(tau);
    return (1.0 / (M_PI * tau)) *
           (std::exp(-2.0 * delta * delta / tau) / std::sqrt(2.0 * M_PI) -
            (delta / rt) * std::erfc(std::sqrt(2.0) * delta / rt));
}

double collision_micro_law(Complex eta, double t, Complex a) {
    const double a2 = std::norm(a);
    if (a2 == 0) fail(errc::invalid_argument, "collision_micro_law: a must be nonzero");
    const double cross = 2.0 * std::real(a * std::conj(eta));  // a etabar + abar eta
    const double t_star = t + (cross * cross - a2 * std::norm(eta)) / a2;
    return (1.0 / (M_PI * a2)) *
           (std::exp(-t_star * t_star / (2.0 * a2 * a2)) / std::sqrt(2.0 * M_PI) +
            (t_star / (2.0 * a2)) * std::erfc(-t_star / (std::sqrt(2.0) * a2)));
}

double macro_spiric(double tau, Complex a, Complex z) {
    if (tau <= 0) fail(errc::invalid_argument, "macro_spiric: tau must be positive");
    const double ap = std::norm(a + z);  // A_+ = |z + a|^2
    const double am = std::norm(a - z);
    if (0.5 * tau * (ap + am) <= ap * am) return 0.0;  // outside (or on) the spiric curve
    const double disc = std::sqrt(tau * tau + (ap - am) * (ap - am));
    return (tau - am - ap + disc) / (2.0 * M_PI * tau * tau);
}

}  // namespace gdyn
