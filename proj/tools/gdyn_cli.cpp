// Command-line front end; everything goes through the public C API.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gdyn/gdyn.h"

namespace {

int status_to_exit(gdyn_status st) {
    switch (st) {
        case GDYN_OK: return 0;
        case GDYN_ERR_INVALID:
        case GDYN_ERR_IO: return 1;
        case GDYN_ERR_NUMERICAL: return 2;
        case GDYN_ERR_VERIFY: return 3;
    }
    return 2;
}

int finish(gdyn_status st) {
    if (st != GDYN_OK) std::fprintf(stderr, "error: %s\n", gdyn_last_error());
    return status_to_exit(st);
}

std::string joined_command_line(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

struct SourceHolder {
    gdyn_source* ptr = nullptr;
    ~SourceHolder() { gdyn_source_free(ptr); }
};

gdyn_status make_source(const std::string& text, int n, SourceHolder& out) {
    if (text.empty()) return gdyn_source_ginibre(n, &out.ptr);
    return gdyn_source_parse(text.c_str(), &out.ptr);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gdyn: dynamics of non-Hermitian random matrix spectra"};
    app.set_config("--config", "", "key=value configuration file; flags override file values");
    app.set_version_flag("--version", gdyn_version());
    app.require_subcommand(1);
    const std::string cmdline = joined_command_line(argc, argv);

    // Shared options.
    std::string out_dir = ".";
    bool gnuplot = false;
    app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    app.add_flag("--gnuplot", gnuplot, "also emit gnuplot scripts");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run stochastic trajectories");
    sim->fallthrough();
    gdyn_sim_config cfg{};
    cfg.n = 2;
    cfg.dt = 1e-3;
    cfg.steps = 100;
    cfg.seed = 1;
    cfg.variance_rate = 1.0;
    cfg.drift_coeff = 0.0;
    cfg.snapshot_every = 1;
    std::string scheme = "matrix-bm", source_text;
    long trajectories = 1;
    bool dump_matrices = false;
    sim->add_option("--scheme", scheme, "matrix-bm | matrix-ou | dyson | coulomb")
        ->capture_default_str();
    sim->add_option("--n", cfg.n, "matrix size")->capture_default_str();
    sim->add_option("--dt", cfg.dt, "time step")->capture_default_str();
    sim->add_option("--steps", cfg.steps, "number of steps")->capture_default_str();
    sim->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    sim->add_option("--variance-rate", cfg.variance_rate, "entrywise noise variance per unit time")
        ->capture_default_str();
    sim->add_option("--drift-coeff", cfg.drift_coeff, "OU restoring rate")->capture_default_str();
    sim->add_option("--snapshot-every", cfg.snapshot_every, "steps between snapshots")
        ->capture_default_str();
    sim->add_option("--source", source_text,
                    "initial eigenvalues, 're,im*count;...' (default: all zero)");
    sim->add_option("--trajectories", trajectories, "independent trajectories")
        ->capture_default_str();
    sim->add_flag("--dump-matrices", dump_matrices, "binary dump of the final matrices");

    // exact
    auto* ex = app.add_subcommand("exact", "exact finite-N fields on a grid");
    ex->fallthrough();
    std::string quantity = "correlator", ex_source_text;
    int ex_n = 2, nx = 21, ny = 21;
    double tau = 1.0;
    gdyn_window win{-1.5, 1.5, -1.5, 1.5};
    bool cross_check = false;
    ex->add_option("--quantity", quantity, "correlator | density")->capture_default_str();
    ex->add_option("--n", ex_n, "matrix size")->capture_default_str();
    ex->add_option("--tau", tau, "rescaled time tau = N t")->capture_default_str();
    ex->add_option("--source", ex_source_text, "source eigenvalues (default: all zero)");
    ex->add_option("--re-min", win.re_min)->capture_default_str();
    ex->add_option("--re-max", win.re_max)->capture_default_str();
    ex->add_option("--im-min", win.im_min)->capture_default_str();
    ex->add_option("--im-max", win.im_max)->capture_default_str();
    ex->add_option("--nx", nx)->capture_default_str();
    ex->add_option("--ny", ny)->capture_default_str();
    ex->add_flag("--cross-check", cross_check,
                 "also evaluate the alternative representation and report the discrepancy");

    // asymptotic
    auto* as = app.add_subcommand("asymptotic", "large-N laws on a grid");
    as->fallthrough();
    std::string law = "macro", as_source_text;
    double as_tau = 1.0, a_re = 1.0, a_im = 0.0;
    int as_nx = 21, as_ny = 21;
    gdyn_window as_win{-1.5, 1.5, -1.5, 1.5};
    as->add_option("--law", law, "macro | spiric | edge | collision")->capture_default_str();
    as->add_option("--tau", as_tau, "time (edge/collision: scaling parameter)")
        ->capture_default_str();
    as->add_option("--source", as_source_text, "source for the macro law");
    as->add_option("--a-re", a_re, "spiric/collision parameter a")->capture_default_str();
    as->add_option("--a-im", a_im)->capture_default_str();
    as->add_option("--re-min", as_win.re_min)->capture_default_str();
    as->add_option("--re-max", as_win.re_max)->capture_default_str();
    as->add_option("--im-min", as_win.im_min)->capture_default_str();
    as->add_option("--im-max", as_win.im_max)->capture_default_str();
    as->add_option("--nx", as_nx)->capture_default_str();
    as->add_option("--ny", as_ny)->capture_default_str();

    // verify
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    ver->fallthrough();
    std::string suite;
    std::uint64_t v_seed = 1;
    int v_points = 0, v_n = 0;
    ver->add_option("suite", suite, "identities | covariances | ecp | hierarchy | integrators")
        ->required();
    ver->add_option("--seed", v_seed)->capture_default_str();
    ver->add_option("--points", v_points, "sample points (0 = suite default)")
        ->capture_default_str();
    ver->add_option("--n", v_n, "matrix size override (0 = suite default)")
        ->capture_default_str();

    // compare-fig1
    auto* fig = app.add_subcommand("compare-fig1",
                                   "Coulomb gas vs matrix OU: trajectories and histograms");
    fig->fallthrough();
    int f_n = 100;
    long f_steps = 3000;
    double f_dt = 1e-3;
    std::uint64_t f_seed = 1;
    fig->add_option("--n", f_n)->capture_default_str();
    fig->add_option("--steps", f_steps)->capture_default_str();
    fig->add_option("--dt", f_dt)->capture_default_str();
    fig->add_option("--seed", f_seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;  // parse failures are validation errors
    }

    if (sim->parsed()) {
        cfg.scheme = scheme.c_str();
        SourceHolder src;
        gdyn_status st = make_source(source_text, cfg.n, src);
        if (st != GDYN_OK) return finish(st);
        return finish(gdyn_cmd_simulate(&cfg, src.ptr, trajectories, dump_matrices ? 1 : 0,
                                        out_dir.c_str(), gnuplot ? 1 : 0, cmdline.c_str()));
    }
    if (ex->parsed()) {
        SourceHolder src;
        gdyn_status st = make_source(ex_source_text, ex_n, src);
        if (st != GDYN_OK) return finish(st);
        return finish(gdyn_cmd_exact(quantity.c_str(), ex_n, tau, src.ptr, win, nx, ny,
                                     cross_check ? 1 : 0, out_dir.c_str(), gnuplot ? 1 : 0,
                                     cmdline.c_str()));
    }
    if (as->parsed()) {
        SourceHolder src;
        if (!as_source_text.empty()) {
            gdyn_status st = gdyn_source_parse(as_source_text.c_str(), &src.ptr);
            if (st != GDYN_OK) return finish(st);
        }
        return finish(gdyn_cmd_asymptotic(law.c_str(), src.ptr, as_tau, a_re, a_im, as_win,
                                          as_nx, as_ny, out_dir.c_str(), cmdline.c_str()));
    }
    if (ver->parsed()) {
        const gdyn_status st = gdyn_verify(suite.c_str(), v_seed, v_points, v_n, out_dir.c_str());
        if (st == GDYN_OK) std::printf("all checks passed\n");
        return finish(st);
    }
    if (fig->parsed()) {
        double ks_c = 0, ks_m = 0;
        const gdyn_status st =
            gdyn_compare_fig1(f_n, f_steps, f_dt, f_seed, out_dir.c_str(), &ks_c, &ks_m);
        if (st == GDYN_OK)
            std::printf("KS(semicircle): coulomb=%.4f matrix-ou=%.4f\n", ks_c, ks_m);
        return finish(st);
    }
    return 1;
}
