#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace gdyn {

namespace {

GaussLegendre compute_gl(int order) {
    // Roots of P_n by Newton from the Chebyshev-like initial guess; standard.
    GaussLegendre gl;
    gl.nodes.resize(order);
    gl.weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        // Map [-1,1] -> [0,1].
        gl.nodes[i] = 0.5 * (1.0 - x);
        gl.nodes[order - 1 - i] = 0.5 * (1.0 + x);
        gl.weights[i] = 0.5 * w;
        gl.weights[order - 1 - i] = 0.5 * w;
    }
    return gl;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
    static std::mutex mtx;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gl(order)).first;
    return it->second;
}

EllipseContour contour_around(const std::vector<double>& poles, double tau, int n) {
    if (poles.empty()) fail(errc::invalid_argument, "contour_around: no poles");
    const double lo = *std::min_element(poles.begin(), poles.end());
    const double hi = *std::max_element(poles.begin(), poles.end());
    if (lo <= 0) fail(errc::pole_collision, "contour_around: pole at or below the origin");
    const double spread = hi - lo;
    // Left vertex at lo/2 keeps the origin outside; vertical semi-axis adds
    // clearance above the real-axis poles.
    const double margin = 0.5 * lo;
    EllipseContour c;
    c.center = 0.5 * (lo + hi);
    c.semi_x = 0.5 * spread + margin;
    // Clearance term is capped by the pole distance: a tall, thin ellipse
    // around poles very close to the origin ruins trapezoid convergence.
    c.semi_y = margin + 0.25 * spread + std::min(0.1 * tau / std::max(1, n), margin);
    return c;
}

Complex contour_integral(const EllipseContour& c, const std::function<Complex(Complex, Complex)>& f,
                         double tol, int start_nodes, int max_nodes) {
    int n = start_nodes;
    std::vector<Complex> vals(n);
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * M_PI * k / n;
        vals[k] = f(c.point(th), c.derivative(th));
    }
    auto total = [](const std::vector<Complex>& v) {
        Complex s = 0;
        for (const auto& x : v) s += x;
        return s;
    };
    Complex prev = total(vals) / Complex(0, static_cast<double>(n));

    while (n < max_nodes) {
        // Double: old nodes are the even ones of the refined grid.
        std::vector<Complex> next(2 * n);
        for (int k = 0; k < n; ++k) next[2 * k] = vals[k];
        for (int k = 0; k < n; ++k) {
            const double th = 2.0 * M_PI * (2 * k + 1) / (2 * n);
            next[2 * k + 1] = f(c.point(th), c.derivative(th));
        }
        vals.swap(next);
        n *= 2;
        const Complex cur = total(vals) / Complex(0, static_cast<double>(n));
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    fail(errc::quadrature_nonconverged, "contour_integral: not converged at " +
                                            std::to_string(max_nodes) + " nodes");
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, double tol,
                    int start_order, int max_order) {
    auto eval = [&](int order) {
        const auto& gl = gauss_legendre(order);
        double s = 0;
        for (int i = 0; i < order; ++i) s += gl.weights[i] * f(a + (b - a) * gl.nodes[i]);
        return s * (b - a);
    };
    double prev = eval(start_order);
    for (int order = 2 * start_order; order <= max_order; order *= 2) {
        const double cur = eval(order);
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    fail(errc::quadrature_nonconverged, "integrate_gl: not converged at order " +
                                            std::to_string(max_order));
}

Complex expm1c(Complex z) {
    if (std::abs(z) < 0.25) {
        Complex term = z, sum = z;
        for (int k = 2; k <= 20; ++k) {
            term *= z / static_cast<double>(k);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::exp(z) - 1.0;
}

}  // namespace gdyn
