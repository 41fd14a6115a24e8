#include "grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace gdyn {

std::pair<int, int> FieldGrid::bin(Complex z) const {
    if (!window.contains(z)) return {-1, -1};
    int ix = static_cast<int>((z.real() - window.re_min) / dx());
    int iy = static_cast<int>((z.imag() - window.im_min) / dy());
    ix = std::min(ix, nx - 1);  // right-edge values land in the last bin
    iy = std::min(iy, ny - 1);
    return {ix, iy};
}

void FieldGrid::write_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) fail(errc::io_error, "cannot open " + path + " for writing");
    std::fputs("re,im,value,stderr\n", f);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const Complex c = center(ix, iy);
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", c.real(), c.imag(), at(ix, iy),
                         se(ix, iy));
        }
    if (std::fclose(f) != 0) fail(errc::io_error, "write failed: " + path);

    nlohmann::json j;
    j["window"] = {window.re_min, window.re_max, window.im_min, window.im_max};
    j["nx"] = nx;
    j["ny"] = ny;
    j["estimator"] = meta.estimator;
    j["n"] = meta.n;
    j["tau"] = meta.tau;
    j["samples"] = meta.samples;
    j["seed"] = meta.seed;
    j["convention"] = meta.convention;
    std::ofstream side(path + ".json");
    if (!side) fail(errc::io_error, "cannot open sidecar for " + path);
    side << j.dump(2) << "\n";
    if (!side) fail(errc::io_error, "sidecar write failed for " + path);
}

FieldGrid FieldGrid::read_csv(const std::string& path) {
    std::ifstream side(path + ".json");
    if (!side) fail(errc::io_error, "missing sidecar for " + path);
    nlohmann::json j;
    side >> j;

    Window w{j["window"][0].get<double>(), j["window"][1].get<double>(),
             j["window"][2].get<double>(), j["window"][3].get<double>()};
    FieldGrid g(w, j["nx"].get<int>(), j["ny"].get<int>());
    g.meta.estimator = j["estimator"];
    g.meta.n = j["n"];
    g.meta.tau = j["tau"];
    g.meta.samples = j["samples"];
    g.meta.seed = j["seed"];
    g.meta.convention = j["convention"];

    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) fail(errc::io_error, "cannot open " + path);
    char line[512];
    if (!std::fgets(line, sizeof line, f)) {
        std::fclose(f);
        fail(errc::io_error, "empty grid file: " + path);
    }
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            double re, im, v, s;
            if (!std::fgets(line, sizeof line, f) ||
                std::sscanf(line, "%lf,%lf,%lf,%lf", &re, &im, &v, &s) != 4) {
                std::fclose(f);
                fail(errc::io_error, "truncated grid file: " + path);
            }
            g.at(ix, iy) = v;
            g.se(ix, iy) = s;
        }
    std::fclose(f);
    return g;
}

}  // namespace gdyn
