#pragma once

#include <map>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "exact.hpp"
#include "grid.hpp"
#include "integrators.hpp"
#include "observables.hpp"

namespace gdyn {

inline const char* kVersion = "1.0.0";

// Worker count: GDYN_THREADS if set, else hardware concurrency.
int thread_count();

// Runs f(i) for i in [0, count) on the worker pool. Each index owns its output
// slot, so results are identical for any thread count.
void parallel_for(long count, const std::function<void(long)>& f);

std::string sha256_file(const std::string& path);

// Run manifest: command line, resolved config, outputs with hashes; written
// atomically (temp file + rename).
struct Manifest {
    std::string command_line;
    std::map<std::string, std::string> config;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
};
void write_manifest(const std::string& path, const Manifest& m);

// Eigenvalue snapshots as CSV (step,time,index,re,im) and matrices in the
// binary container: magic "GDYN", version byte 1, uint32 n, then row-major
// (re, im) doubles, all little-endian.
void write_snapshots_csv(const std::string& path, const std::vector<TrajectorySnapshot>& snaps);
void write_matrix_binary(const std::string& path, const Matrix& m);
Matrix read_matrix_binary(const std::string& path);

// Kolmogorov-Smirnov distances against the limiting laws.
double ks_semicircle(std::vector<double> xs);          // semicircle on [-1, 1]
double ks_circular(std::vector<double> moduli, double radius);

// --- command runners -------------------------------------------------------

struct CommonOpts {
    std::string out_dir = ".";
    bool gnuplot = false;
    std::string command_line;
};

struct SimulateOpts {
    SimConfig config;
    long trajectories = 1;
    bool dump_matrices = false;
    CommonOpts common;
};
void cmd_simulate(const SimulateOpts& opts);

struct ExactCmdOpts {
    std::string quantity = "correlator";  // correlator | density
    SourceSpec source;
    int n = 2;
    double tau = 1.0;
    Window window;
    int nx = 21, ny = 21;
    bool cross_check = false;
    CommonOpts common;
};
void cmd_exact(const ExactCmdOpts& opts);

struct AsymptoticOpts {
    std::string law = "macro";  // macro | spiric | edge | collision
    SourceSpec source;
    double tau = 1.0;
    Complex a;  // spiric / collision parameter
    Window window;
    int nx = 21, ny = 21;
    CommonOpts common;
};
void cmd_asymptotic(const AsymptoticOpts& opts);

struct Fig1Opts {
    int n = 100;
    long steps = 3000;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    long snapshot_every = 20;
    CommonOpts common;
};
void cmd_compare_fig1(const Fig1Opts& opts);

struct VerifyOpts {
    std::string suite;  // identities | covariances | ecp | hierarchy | integrators
    std::uint64_t seed = 1;
    int points = 100;
    int n = 0;  // 0 -> suite default
    CommonOpts common;
};
struct CheckRow {
    std::string name;
    int n = 0;
    double residual = 0;
    double tolerance = 0;
    bool pass = false;
};
// Returns the rows and writes text + CSV reports; overall pass iff all rows pass.
std::vector<CheckRow> run_verify(const VerifyOpts& opts);

}  // namespace gdyn
