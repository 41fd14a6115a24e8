#pragma once

#include <optional>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"
#include "source.hpp"

namespace gdyn {

enum class Scheme { MatrixBM, MatrixOU, DysonSDE, Coulomb };

struct NoiseConvention {
    enum class Kind { RawDiffusion, UnitDiskOU, CoulombGas };
    Kind kind = Kind::RawDiffusion;
    double variance_rate = 1.0;  // entrywise <dX dXbar> per unit time
    double drift_coeff = 0.0;

    static NoiseConvention raw_diffusion(double rate = 1.0) {
        return {Kind::RawDiffusion, rate, 0.0};
    }
    // Fig.-1-style Ornstein-Uhlenbeck flow with stationary spectral radius 1.
    static NoiseConvention unit_disk_ou(int n) {
        return {Kind::UnitDiskOU, 1.0 / (2.0 * n), 0.25};
    }
    static NoiseConvention coulomb_gas(int n) { return {Kind::CoulombGas, 1.0 / (2.0 * n), 2.0}; }
};

struct TrajectoryState {
    double time = 0;
    Matrix x;                               // MatrixBM / MatrixOU
    std::optional<SpectralDecomposition> dec;  // DysonSDE
    Vector lambdas;                         // Coulomb
};

struct SimConfig {
    int n = 2;
    Scheme scheme = Scheme::MatrixBM;
    double dt = 1e-3;
    long steps = 0;
    uint64_t seed = 0;
    NoiseConvention convention;
    SourceSpec source;             // initial condition X0 = diag(source)
    std::optional<Matrix> x0;      // explicit start (matrix schemes only); overrides source
    long snapshot_every = 1;
    double gap_floor = kDefaultGapFloor;
    int max_rejects = 64;          // consecutive rejected steps before giving up
};

struct TrajectorySnapshot {
    long step = 0;
    double time = 0;
    Vector lambdas;
    std::optional<Matrix> x;       // populated for the matrix schemes
    std::optional<SpectralDecomposition> dec;  // populated for DysonSDE
};

// Draws an N x N increment with <dX_ij dXbar_kl> = variance_rate dt delta delta.
Matrix draw_increment(int n, double variance_rate, double dt, Rng& rng);

void step_matrix_bm(TrajectoryState& st, const NoiseConvention& conv, double dt, Rng& rng);
void step_matrix_ou(TrajectoryState& st, const NoiseConvention& conv, double dt, Rng& rng);

// One Euler-Maruyama step of the eigenvalue/eigenvector system, driven by the
// given raw-matrix increment dx (so it can be coupled to a direct step).
// Throws errc::gap_collapse when the current spectrum is closer than gap_floor.
void step_dyson(TrajectoryState& st, const Matrix& dx, double dt, double gap_floor);

// Langevin step for eigenvalues alone (2D Coulomb gas with harmonic trap).
void step_coulomb(Vector& lambdas, int n, double dt, double gap_floor, Rng& rng);

// Runs a full trajectory; deterministic given config.seed (trajectory_index
// selects an independent stream for ensemble runs). Snapshot eigenvalues are
// ordered continuously across snapshots by greedy nearest-neighbor matching.
std::vector<TrajectorySnapshot> run_trajectory(const SimConfig& config,
                                               uint64_t trajectory_index = 0);

}  // namespace gdyn
