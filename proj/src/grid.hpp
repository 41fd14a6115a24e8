#pragma once

#include <string>
#include <vector>

#include "linalg.hpp"

namespace gdyn {

struct Window {
    double re_min = -1, re_max = 1, im_min = -1, im_max = 1;

    bool contains(Complex z) const {
        return z.real() >= re_min && z.real() < re_max && z.imag() >= im_min && z.imag() < im_max;
    }
    double width() const { return re_max - re_min; }
    double height() const { return im_max - im_min; }
};

struct GridMeta {
    std::string estimator;
    int n = 0;
    double tau = 0;
    long samples = 0;
    std::uint64_t seed = 0;
    std::string convention;
};

// Real-valued field sampled at bin centers of a regular window partition.
struct FieldGrid {
    Window window;
    int nx = 0, ny = 0;
    std::vector<double> values;   // index ix + nx * iy
    std::vector<double> stderrs;  // same layout, >= 0
    GridMeta meta;

    FieldGrid() = default;
    FieldGrid(const Window& w, int nx_, int ny_)
        : window(w), nx(nx_), ny(ny_), values(static_cast<size_t>(nx_) * ny_, 0.0),
          stderrs(static_cast<size_t>(nx_) * ny_, 0.0) {
        if (nx_ < 1 || ny_ < 1) fail(errc::invalid_argument, "FieldGrid: empty grid");
    }

    double dx() const { return window.width() / nx; }
    double dy() const { return window.height() / ny; }
    size_t idx(int ix, int iy) const { return static_cast<size_t>(ix) + static_cast<size_t>(nx) * iy; }
    double& at(int ix, int iy) { return values[idx(ix, iy)]; }
    double at(int ix, int iy) const { return values[idx(ix, iy)]; }
    double& se(int ix, int iy) { return stderrs[idx(ix, iy)]; }
    double se(int ix, int iy) const { return stderrs[idx(ix, iy)]; }
    Complex center(int ix, int iy) const {
        return {window.re_min + (ix + 0.5) * dx(), window.im_min + (iy + 0.5) * dy()};
    }
    // Bin of z, or (-1, -1) when outside the window.
    std::pair<int, int> bin(Complex z) const;

    bool same_layout(const FieldGrid& other) const {
        return nx == other.nx && ny == other.ny && window.re_min == other.window.re_min &&
               window.re_max == other.window.re_max && window.im_min == other.window.im_min &&
               window.im_max == other.window.im_max;
    }

    // CSV (header re,im,value,stderr; %.17g) plus a JSON sidecar at
    // path + ".json" carrying window/shape/meta. Round-trips bit-exactly.
    void write_csv(const std::string& path) const;
    static FieldGrid read_csv(const std::string& path);
};

}  // namespace gdyn
