#include <doctest.h>

#include "integrators.hpp"
#include "linalg.hpp"

using namespace gdyn;

TEST_CASE("zero steps returns the initial condition only") {
    SimConfig cfg;
    cfg.n = 3;
    cfg.steps = 0;
    cfg.source = SourceSpec::parse("1,0;0,1;-1,0");
    for (Scheme s : {Scheme::MatrixBM, Scheme::DysonSDE, Scheme::Coulomb}) {
        cfg.scheme = s;
        const auto snaps = run_trajectory(cfg);
        REQUIRE(snaps.size() == 1);
        CHECK(snaps[0].step == 0);
        Vector a = snaps[0].lambdas;
        std::sort(a.begin(), a.end(), [](Complex x, Complex y) {
            return std::make_pair(x.real(), x.imag()) < std::make_pair(y.real(), y.imag());
        });
        CHECK(a[0] == Complex(-1, 0));
        CHECK(a[2] == Complex(1, 0));
    }
}

TEST_CASE("snapshot cadence includes the start and the final step") {
    SimConfig cfg;
    cfg.n = 2;
    cfg.scheme = Scheme::MatrixBM;
    cfg.dt = 1e-3;
    cfg.steps = 350;
    cfg.snapshot_every = 100;
    cfg.source = SourceSpec::ginibre(2);
    const auto snaps = run_trajectory(cfg);
    REQUIRE(snaps.size() == 5);  // 0, 100, 200, 300, 350
    CHECK(snaps.front().step == 0);
    CHECK(snaps.back().step == 350);
    CHECK(snaps.back().time == doctest::Approx(0.35));
}

TEST_CASE("trajectories are bit-for-bit reproducible") {
    SimConfig cfg;
    cfg.n = 5;
    cfg.dt = 1e-3;
    cfg.steps = 40;
    cfg.seed = 77;
    // spread source: the Coulomb drift is singular at coinciding eigenvalues
    cfg.source = SourceSpec::parse("0.5,0;-0.5,0;0,0.5;0,-0.5;0,0");
    for (Scheme s : {Scheme::MatrixBM, Scheme::MatrixOU, Scheme::Coulomb}) {
        cfg.scheme = s;
        const auto r1 = run_trajectory(cfg, 3);
        const auto r2 = run_trajectory(cfg, 3);
        REQUIRE(r1.size() == r2.size());
        for (size_t k = 0; k < r1.size(); ++k)
            CHECK((r1[k].lambdas.array() == r2[k].lambdas.array()).all());
        // a different stream gives a different path
        const auto r3 = run_trajectory(cfg, 4);
        CHECK(!(r1.back().lambdas.array() == r3.back().lambdas.array()).all());
    }
}

TEST_CASE("increment moments match the convention") {
    Rng rng(5);
    const int n = 4;
    const double dt = 0.01, rate = 2.0;
    const long m = 20000;
    double var = 0, pseudo = 0;
    for (long k = 0; k < m; ++k) {
        const Matrix dx = draw_increment(n, rate, dt, rng);
        var += std::norm(dx(1, 2));
        pseudo += (dx(1, 2) * dx(1, 2)).real();  // <dX dX> (no conjugate) should vanish
    }
    CHECK(var / m == doctest::Approx(rate * dt).epsilon(0.05));
    CHECK(std::abs(pseudo / m) < 5 * rate * dt / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("matrix Brownian motion accumulates entry variance linearly") {
    SimConfig cfg;
    cfg.n = 30;
    cfg.scheme = Scheme::MatrixBM;
    cfg.dt = 1e-2;
    cfg.steps = 10;
    cfg.seed = 9;
    cfg.snapshot_every = 10;
    cfg.source = SourceSpec::ginibre(30);
    const auto snaps = run_trajectory(cfg);
    const Matrix& x = *snaps.back().x;
    const double t = 0.1;
    const double mean_sq = x.cwiseAbs2().sum() / (30.0 * 30.0);
    CHECK(mean_sq == doctest::Approx(t).epsilon(0.15));
}

TEST_CASE("a degenerate start stops the eigenvector integrator immediately") {
    SimConfig cfg;
    cfg.n = 3;
    cfg.scheme = Scheme::DysonSDE;
    cfg.dt = 1e-3;
    cfg.steps = 10;
    cfg.source = SourceSpec::ginibre(3);  // triple zero
    try {
        run_trajectory(cfg);
        FAIL("expected gap collapse");
    } catch (const Error& e) {
        CHECK(e.code() == errc::gap_collapse);
        CHECK(std::string(e.what()).find("step 1") != std::string::npos);
    }
}

TEST_CASE("eigenvector integrator tracks the direct diagonalization") {
    SimConfig cfg;
    cfg.n = 4;
    cfg.scheme = Scheme::DysonSDE;
    cfg.dt = 1e-4;
    cfg.steps = 100;
    cfg.seed = 21;
    cfg.snapshot_every = 100;
    cfg.source = SourceSpec::parse("1,0;-1,0;0,1;0,-1");
    const auto snaps = run_trajectory(cfg);
    const auto& dec = *snaps.back().dec;
    // reconstruct X from the evolved decomposition and rediagonalize
    const auto direct = eigendecompose(reconstruct(dec));
    const auto p = match_eigenvalues(dec.lambdas, direct.lambdas);
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(dec.lambdas[i] - direct.lambdas[p[i]]) < 1e-12);
    CHECK(dec.gauge == Gauge::Trajectory);
}

TEST_CASE("coulomb gas stays finite and keeps particles apart") {
    SimConfig cfg;
    cfg.n = 16;
    cfg.scheme = Scheme::Coulomb;
    cfg.dt = 1e-3;
    cfg.steps = 500;
    cfg.seed = 31;
    cfg.snapshot_every = 100;
    cfg.convention = NoiseConvention::coulomb_gas(16);
    SourceSpec start;
    for (int i = 0; i < 16; ++i) start.entries.push_back({Complex(0.05 * (i - 8), 0.02 * i), 1});
    cfg.source = start;
    const auto snaps = run_trajectory(cfg);
    for (const auto& s : snaps) {
        for (int i = 0; i < 16; ++i) CHECK(std::isfinite(std::abs(s.lambdas[i])));
        CHECK(min_pairwise_gap(s.lambdas) > 0);
    }
    // harmonic trap keeps the cloud near the unit disk
    CHECK(snaps.back().lambdas.cwiseAbs().maxCoeff() < 3.0);
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.n = 2;
    cfg.steps = 10;
    cfg.dt = -1;
    cfg.source = SourceSpec::ginibre(2);
    CHECK_THROWS_AS(run_trajectory(cfg), Error);
    cfg.dt = 1e-3;
    cfg.source = SourceSpec::ginibre(3);  // size mismatch
    CHECK_THROWS_AS(run_trajectory(cfg), Error);
}
