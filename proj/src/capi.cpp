#include "gdyn/gdyn.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "app.hpp"

namespace {

thread_local std::string g_last_error;

gdyn_status classify(const gdyn::Error& e) {
    switch (e.exit_class()) {
        case 1:
            return e.code() == gdyn::errc::io_error ? GDYN_ERR_IO : GDYN_ERR_INVALID;
        case 3:
            return GDYN_ERR_VERIFY;
        default:
            return GDYN_ERR_NUMERICAL;
    }
}

template <typename F>
gdyn_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return GDYN_OK;
    } catch (const gdyn::Error& e) {
        g_last_error = e.what();
        return classify(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return GDYN_ERR_NUMERICAL;
    }
}

}  // namespace

struct gdyn_source {
    gdyn::SourceSpec spec;
};

namespace {

gdyn::SimConfig to_sim_config(const gdyn_sim_config& config, const gdyn_source& initial) {
    gdyn::SimConfig cfg;
    cfg.n = config.n;
    const std::string scheme = config.scheme ? config.scheme : "";
    if (scheme == "matrix-bm")
        cfg.scheme = gdyn::Scheme::MatrixBM;
    else if (scheme == "matrix-ou")
        cfg.scheme = gdyn::Scheme::MatrixOU;
    else if (scheme == "dyson")
        cfg.scheme = gdyn::Scheme::DysonSDE;
    else if (scheme == "coulomb")
        cfg.scheme = gdyn::Scheme::Coulomb;
    else
        gdyn::fail(gdyn::errc::invalid_argument, "unknown scheme '" + scheme + "'");
    cfg.dt = config.dt;
    cfg.steps = config.steps;
    cfg.seed = config.seed;
    cfg.convention.variance_rate = config.variance_rate;
    cfg.convention.drift_coeff = config.drift_coeff;
    cfg.snapshot_every = config.snapshot_every > 0 ? config.snapshot_every : 1;
    cfg.source = initial.spec;
    return cfg;
}

}  // namespace

struct gdyn_grid {
    gdyn::FieldGrid grid;
};

extern "C" {

const char* gdyn_version(void) { return gdyn::kVersion; }

const char* gdyn_last_error(void) { return g_last_error.c_str(); }

gdyn_status gdyn_source_parse(const char* text, gdyn_source** out) {
    return guarded([&] {
        if (!text || !out) gdyn::fail(gdyn::errc::invalid_argument, "null argument");
        *out = new gdyn_source{gdyn::SourceSpec::parse(text)};
    });
}

gdyn_status gdyn_source_ginibre(int n, gdyn_source** out) {
    return guarded([&] {
        if (!out || n < 1) gdyn::fail(gdyn::errc::invalid_argument, "bad source size");
        *out = new gdyn_source{gdyn::SourceSpec::ginibre(n)};
    });
}

gdyn_status gdyn_source_spiric(double a_re, double a_im, int n, gdyn_source** out) {
    return guarded([&] {
        if (!out) gdyn::fail(gdyn::errc::invalid_argument, "null output");
        *out = new gdyn_source{gdyn::SourceSpec::spiric({a_re, a_im}, n)};
    });
}

int gdyn_source_size(const gdyn_source* s) { return s ? s->spec.total() : 0; }

void gdyn_source_free(gdyn_source* s) { delete s; }

gdyn_status gdyn_exact_correlator(int n, double tau, double z_re, double z_im,
                                  const gdyn_source* source, double* out) {
    return guarded([&] {
        if (!source || !out) gdyn::fail(gdyn::errc::invalid_argument, "null argument");
        const gdyn::Complex z(z_re, z_im);
        if (source->spec.entries.size() == 1)
            *out = gdyn::ginibre_closed_sum(n, tau,
                                            std::norm(z - source->spec.entries[0].first));
        else
            *out = gdyn::correlator_beta_form(n, tau, z, source->spec);
    });
}

gdyn_status gdyn_exact_density(int n, double tau, double z_re, double z_im,
                               const gdyn_source* source, double* out) {
    return guarded([&] {
        if (!source || !out) gdyn::fail(gdyn::errc::invalid_argument, "null argument");
        const gdyn::Complex z(z_re, z_im);
        if (source->spec.entries.size() == 1)
            *out = gdyn::ginibre_density_closed(n, tau,
                                                std::norm(z - source->spec.entries[0].first));
        else
            *out = gdyn::density_source(n, tau, z, source->spec);
    });
}

gdyn_status gdyn_macro_correlator(double tau, double z_re, double z_im,
                                  const gdyn_source* source, double* out) {
    return guarded([&] {
        if (!source || !out) gdyn::fail(gdyn::errc::invalid_argument, "null argument");
        *out = gdyn::macro_O(tau, {z_re, z_im}, source->spec);
    });
}

gdyn_status gdyn_edge_law(double delta, double tau, double* out) {
    return guarded([&] {
        if (!out) gdyn::fail(gdyn::errc::invalid_argument, "null output");
        *out = gdyn::edge_micro_law(delta, tau);
    });
}

gdyn_status gdyn_collision_law(double eta_re, double eta_im, double t, double a_re, double a_im,
                               double* out) {
    return guarded([&] {
        if (!out) gdyn::fail(gdyn::errc::invalid_argument, "null output");
        *out = gdyn::collision_micro_law({eta_re, eta_im}, t, {a_re, a_im});
    });
}

gdyn_status gdyn_spiric_inside(double tau, double a_re, double a_im, double z_re, double z_im,
                               int* out) {
    return guarded([&] {
        if (!out) gdyn::fail(gdyn::errc::invalid_argument, "null output");
        *out = gdyn::spiric_inside(tau, {a_re, a_im}, {z_re, z_im}) ? 1 : 0;
    });
}

int gdyn_grid_nx(const gdyn_grid* g) { return g ? g->grid.nx : 0; }
int gdyn_grid_ny(const gdyn_grid* g) { return g ? g->grid.ny : 0; }

double gdyn_grid_value(const gdyn_grid* g, int ix, int iy) {
    if (!g || ix < 0 || iy < 0 || ix >= g->grid.nx || iy >= g->grid.ny)
        return std::nan("");
    return g->grid.at(ix, iy);
}

double gdyn_grid_stderr(const gdyn_grid* g, int ix, int iy) {
    if (!g || ix < 0 || iy < 0 || ix >= g->grid.nx || iy >= g->grid.ny)
        return std::nan("");
    return g->grid.se(ix, iy);
}

gdyn_status gdyn_grid_write_csv(const gdyn_grid* g, const char* path) {
    return guarded([&] {
        if (!g || !path) gdyn::fail(gdyn::errc::invalid_argument, "null argument");
        g->grid.write_csv(path);
    });
}

gdyn_status gdyn_grid_read_csv(const char* path, gdyn_grid** out) {
    return guarded([&] {
        if (!path || !out) gdyn::fail(gdyn::errc::invalid_argument, "null argument");
        *out = new gdyn_grid{gdyn::FieldGrid::read_csv(path)};
    });
}

void gdyn_grid_free(gdyn_grid* g) { delete g; }

gdyn_status gdyn_exact_grid(const char* quantity, int n, double tau, const gdyn_source* source,
                            gdyn_window window, int nx, int ny, gdyn_grid** out) {
    return guarded([&] {
        if (!quantity || !source || !out)
            gdyn::fail(gdyn::errc::invalid_argument, "null argument");
        gdyn::ExactCmdOpts opts;
        opts.quantity = quantity;
        opts.source = source->spec;
        opts.n = n;
        opts.tau = tau;
        opts.window = {window.re_min, window.re_max, window.im_min, window.im_max};
        opts.nx = nx;
        opts.ny = ny;
        // Evaluate in-process rather than via the command runner: no files.
        gdyn::FieldGrid g(opts.window, nx, ny);
        g.meta.estimator = std::string("exact_") + quantity;
        g.meta.n = n;
        g.meta.tau = tau;
        const bool uniform = opts.source.entries.size() == 1;
        const bool corr = opts.quantity == "correlator";
        if (!corr && opts.quantity != "density")
            gdyn::fail(gdyn::errc::invalid_argument, "quantity must be correlator or density");
        gdyn::parallel_for(static_cast<long>(g.values.size()), [&](long cell) {
            const gdyn::Complex z = g.center(static_cast<int>(cell % nx),
                                             static_cast<int>(cell / nx));
            try {
                if (uniform) {
                    const double r2 = std::norm(z - opts.source.entries[0].first);
                    g.values[cell] = corr ? gdyn::ginibre_closed_sum(n, tau, r2)
                                          : gdyn::ginibre_density_closed(n, tau, r2);
                } else {
                    g.values[cell] = corr
                                         ? gdyn::correlator_beta_form(n, tau, z, opts.source)
                                         : gdyn::density_source(n, tau, z, opts.source);
                }
            } catch (const gdyn::Error& e) {
                if (e.code() != gdyn::errc::pole_collision) throw;
                g.values[cell] = std::nan("");
                g.stderrs[cell] = std::nan("");
            }
        });
        *out = new gdyn_grid{std::move(g)};
    });
}

gdyn_status gdyn_simulate(const gdyn_sim_config* config, const gdyn_source* initial,
                          const char* snapshot_path) {
    return guarded([&] {
        if (!config || !initial || !snapshot_path)
            gdyn::fail(gdyn::errc::invalid_argument, "null argument");
        gdyn::write_snapshots_csv(snapshot_path,
                                  gdyn::run_trajectory(to_sim_config(*config, *initial)));
    });
}

gdyn_status gdyn_compare_fig1(int n, long steps, double dt, uint64_t seed, const char* out_dir,
                              double* ks_coulomb, double* ks_matrix_ou) {
    return guarded([&] {
        if (!out_dir) gdyn::fail(gdyn::errc::invalid_argument, "null out_dir");
        gdyn::Fig1Opts opts;
        opts.n = n;
        opts.steps = steps;
        opts.dt = dt;
        opts.seed = seed;
        opts.common.out_dir = out_dir;
        opts.common.command_line = "gdyn_compare_fig1 (C API)";
        gdyn::cmd_compare_fig1(opts);
        if (ks_coulomb || ks_matrix_ou) {
            // The command stores both distances in the manifest; recompute the
            // caller-facing values directly from the emitted trajectories.
            for (int which = 0; which < 2; ++which) {
                double* slot = which == 0 ? ks_coulomb : ks_matrix_ou;
                if (!slot) continue;
                const std::string path = std::string(out_dir) + "/trajectories_" +
                                         (which == 0 ? "coulomb" : "matrix_ou") + ".csv";
                std::FILE* f = std::fopen(path.c_str(), "r");
                if (!f) gdyn::fail(gdyn::errc::io_error, "missing " + path);
                char line[256];
                std::vector<double> res;
                std::vector<long> steps_seen;
                std::fgets(line, sizeof line, f);
                long step;
                double time, re, im;
                int idx;
                while (std::fgets(line, sizeof line, f))
                    if (std::sscanf(line, "%ld,%lf,%d,%lf,%lf", &step, &time, &idx, &re, &im) ==
                        5) {
                        res.push_back(re);
                        steps_seen.push_back(step);
                    }
                std::fclose(f);
                // Last 40 snapshots only, as in the emitted histograms.
                std::vector<long> uniq = steps_seen;
                std::sort(uniq.begin(), uniq.end());
                uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
                const long cut =
                    uniq.size() > 40 ? uniq[uniq.size() - 40] : uniq.empty() ? 0 : uniq.front();
                std::vector<double> xs;
                for (size_t i = 0; i < res.size(); ++i)
                    if (steps_seen[i] >= cut) xs.push_back(res[i]);
                *slot = gdyn::ks_semicircle(xs);
            }
        }
    });
}

gdyn_status gdyn_verify(const char* suite, uint64_t seed, int points, int n,
                        const char* out_dir) {
    return guarded([&] {
        if (!suite || !out_dir) gdyn::fail(gdyn::errc::invalid_argument, "null argument");
        gdyn::VerifyOpts opts;
        opts.suite = suite;
        opts.seed = seed;
        opts.points = points;
        opts.n = n;
        opts.common.out_dir = out_dir;
        opts.common.command_line = "gdyn_verify (C API)";
        const auto rows = gdyn::run_verify(opts);
        for (const auto& r : rows)
            if (!r.pass)
                gdyn::fail(gdyn::errc::verification_failed, "check failed: " + r.name);
    });
}

gdyn_status gdyn_cmd_simulate(const gdyn_sim_config* config, const gdyn_source* initial,
                              long trajectories, int dump_matrices, const char* out_dir,
                              int gnuplot, const char* command_line) {
    return guarded([&] {
        if (!config || !initial || !out_dir)
            gdyn::fail(gdyn::errc::invalid_argument, "null argument");
        gdyn::SimulateOpts opts;
        opts.config = to_sim_config(*config, *initial);
        opts.trajectories = trajectories > 0 ? trajectories : 1;
        opts.dump_matrices = dump_matrices != 0;
        opts.common.out_dir = out_dir;
        opts.common.gnuplot = gnuplot != 0;
        opts.common.command_line = command_line ? command_line : "";
        gdyn::cmd_simulate(opts);
    });
}

gdyn_status gdyn_cmd_exact(const char* quantity, int n, double tau, const gdyn_source* source,
                           gdyn_window window, int nx, int ny, int cross_check,
                           const char* out_dir, int gnuplot, const char* command_line) {
    return guarded([&] {
        if (!quantity || !source || !out_dir)
            gdyn::fail(gdyn::errc::invalid_argument, "null argument");
        gdyn::ExactCmdOpts opts;
        opts.quantity = quantity;
        opts.source = source->spec;
        opts.n = n;
        opts.tau = tau;
        opts.window = {window.re_min, window.re_max, window.im_min, window.im_max};
        opts.nx = nx;
        opts.ny = ny;
        opts.cross_check = cross_check != 0;
        opts.common.out_dir = out_dir;
        opts.common.gnuplot = gnuplot != 0;
        opts.common.command_line = command_line ? command_line : "";
        gdyn::cmd_exact(opts);
    });
}

gdyn_status gdyn_cmd_asymptotic(const char* law, const gdyn_source* source, double tau,
                                double a_re, double a_im, gdyn_window window, int nx, int ny,
                                const char* out_dir, const char* command_line) {
    return guarded([&] {
        if (!law || !out_dir) gdyn::fail(gdyn::errc::invalid_argument, "null argument");
        gdyn::AsymptoticOpts opts;
        opts.law = law;
        if (source) opts.source = source->spec;
        opts.tau = tau;
        opts.a = {a_re, a_im};
        opts.window = {window.re_min, window.re_max, window.im_min, window.im_max};
        opts.nx = nx;
        opts.ny = ny;
        opts.common.out_dir = out_dir;
        opts.common.command_line = command_line ? command_line : "";
        gdyn::cmd_asymptotic(opts);
    });
}

}  // extern "C"
