/* C interface to the gdyn library: stochastic dynamics of complex
 * non-Hermitian matrix spectra, exact finite-N spectral observables, and
 * their asymptotic laws.
 *
 * All functions return gdyn_status; on failure, gdyn_last_error() describes
 * the problem for the calling thread. Objects are opaque handles released
 * with their _free function. */
#ifndef GDYN_H
#define GDYN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gdyn_status {
    GDYN_OK = 0,
    GDYN_ERR_INVALID = 1,   /* bad arguments or configuration */
    GDYN_ERR_NUMERICAL = 2, /* quadrature/degeneracy/overflow failures */
    GDYN_ERR_VERIFY = 3,    /* a verification suite reported failures */
    GDYN_ERR_IO = 4         /* file system problems */
} gdyn_status;

const char* gdyn_version(void);
/* Message for the most recent failure on this thread ("" if none). */
const char* gdyn_last_error(void);

/* --- sources: normal initial conditions diag(a_1..a_N) ------------------- */
typedef struct gdyn_source gdyn_source;

/* Text form: semicolon-separated "re,im" or "re,im*count" terms. */
gdyn_status gdyn_source_parse(const char* text, gdyn_source** out);
gdyn_status gdyn_source_ginibre(int n, gdyn_source** out);   /* all zero */
gdyn_status gdyn_source_spiric(double a_re, double a_im, int n, gdyn_source** out);
int gdyn_source_size(const gdyn_source* s);
void gdyn_source_free(gdyn_source* s);

/* --- exact finite-N observables ------------------------------------------ */
/* Eigenvector correlator O(z) at time tau (beta-contour representation; the
 * closed sum is used automatically for single-point sources). */
gdyn_status gdyn_exact_correlator(int n, double tau, double z_re, double z_im,
                                  const gdyn_source* source, double* out);
/* Spectral density (normalized to 1 over the plane). */
gdyn_status gdyn_exact_density(int n, double tau, double z_re, double z_im,
                               const gdyn_source* source, double* out);

/* --- asymptotic laws ------------------------------------------------------ */
gdyn_status gdyn_macro_correlator(double tau, double z_re, double z_im,
                                  const gdyn_source* source, double* out);
gdyn_status gdyn_edge_law(double delta, double tau, double* out);
gdyn_status gdyn_collision_law(double eta_re, double eta_im, double t, double a_re, double a_im,
                               double* out);
/* 1 if z lies inside the spectral support of the source (a, -a) at tau. */
gdyn_status gdyn_spiric_inside(double tau, double a_re, double a_im, double z_re, double z_im,
                               int* out);

/* --- field grids ---------------------------------------------------------- */
typedef struct gdyn_grid gdyn_grid;
typedef struct gdyn_window {
    double re_min, re_max, im_min, im_max;
} gdyn_window;

int gdyn_grid_nx(const gdyn_grid* g);
int gdyn_grid_ny(const gdyn_grid* g);
/* Value / standard error at bin (ix, iy); NaN marks missing points. */
double gdyn_grid_value(const gdyn_grid* g, int ix, int iy);
double gdyn_grid_stderr(const gdyn_grid* g, int ix, int iy);
/* CSV with header re,im,value,stderr plus a JSON sidecar at path + ".json";
 * round-trips bit-exactly through gdyn_grid_read_csv. */
gdyn_status gdyn_grid_write_csv(const gdyn_grid* g, const char* path);
gdyn_status gdyn_grid_read_csv(const char* path, gdyn_grid** out);
void gdyn_grid_free(gdyn_grid* g);

/* Exact correlator or density evaluated over a grid ("correlator"/"density");
 * pole collisions become NaN entries. */
gdyn_status gdyn_exact_grid(const char* quantity, int n, double tau, const gdyn_source* source,
                            gdyn_window window, int nx, int ny, gdyn_grid** out);

/* --- simulation ----------------------------------------------------------- */
typedef struct gdyn_sim_config {
    int n;
    const char* scheme; /* "matrix-bm" | "matrix-ou" | "dyson" | "coulomb" */
    double dt;
    long steps;
    uint64_t seed;
    double variance_rate; /* entrywise <dX dXbar> per unit time */
    double drift_coeff;   /* OU restoring rate (0 for pure diffusion) */
    long snapshot_every;
} gdyn_sim_config;

/* Runs one trajectory and writes eigenvalue snapshots as CSV
 * (step,time,index,re,im) to snapshot_path. Deterministic per seed. */
gdyn_status gdyn_simulate(const gdyn_sim_config* config, const gdyn_source* initial,
                          const char* snapshot_path);

/* Coulomb-gas vs matrix Ornstein-Uhlenbeck comparison; writes trajectory and
 * histogram CSVs into out_dir and reports both Kolmogorov-Smirnov distances
 * from the semicircle law. */
gdyn_status gdyn_compare_fig1(int n, long steps, double dt, uint64_t seed, const char* out_dir,
                              double* ks_coulomb, double* ks_matrix_ou);

/* Runs a verification suite ("identities", "covariances", "ecp", "hierarchy",
 * "integrators"); writes reports into out_dir. points and n <= 0 select suite
 * defaults. Returns GDYN_ERR_VERIFY when any check fails. */
gdyn_status gdyn_verify(const char* suite, uint64_t seed, int points, int n,
                        const char* out_dir);

/* --- full command runners (file-emitting, manifest-writing) ---------------
 * These back the CLI subcommands: outputs plus a manifest.json land in
 * out_dir; command_line is recorded verbatim in the manifest. gnuplot != 0
 * additionally emits a ready-to-run plot script. */
gdyn_status gdyn_cmd_simulate(const gdyn_sim_config* config, const gdyn_source* initial,
                              long trajectories, int dump_matrices, const char* out_dir,
                              int gnuplot, const char* command_line);
gdyn_status gdyn_cmd_exact(const char* quantity, int n, double tau, const gdyn_source* source,
                           gdyn_window window, int nx, int ny, int cross_check,
                           const char* out_dir, int gnuplot, const char* command_line);
/* law: "macro" (uses source) | "spiric" | "collision" (use a) | "edge".
 * For "edge" the grid's real axis is the rescaled distance to the edge; for
 * "collision" tau is the rescaled time offset. */
gdyn_status gdyn_cmd_asymptotic(const char* law, const gdyn_source* source, double tau,
                                double a_re, double a_im, gdyn_window window, int nx, int ny,
                                const char* out_dir, const char* command_line);

#ifdef __cplusplus
}
#endif

#endif /* GDYN_H */
