#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gdyn/gdyn.h"

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path p;
    TempDir(const char* tag) : p(fs::temp_directory_path() / tag) {
        fs::remove_all(p);
        fs::create_directories(p);
    }
    ~TempDir() { fs::remove_all(p); }
    std::string file(const char* name) const { return (p / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GDYN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("version and error reporting") {
    CHECK(std::string(gdyn_version()) == "1.0.0");
    gdyn_source* s = nullptr;
    CHECK(gdyn_source_parse("not a source", &s) == GDYN_ERR_INVALID);
    CHECK(std::string(gdyn_last_error()).size() > 0);
    CHECK(s == nullptr);
}

TEST_CASE("sources through the C interface") {
    gdyn_source* s = nullptr;
    REQUIRE(gdyn_source_parse("0.5,0*2;-0.5,0*2", &s) == GDYN_OK);
    CHECK(gdyn_source_size(s) == 4);
    gdyn_source_free(s);
    REQUIRE(gdyn_source_spiric(0.8, 0.0, 6, &s) == GDYN_OK);
    CHECK(gdyn_source_size(s) == 6);
    gdyn_source_free(s);
    CHECK(gdyn_source_spiric(0.8, 0.0, 5, &s) == GDYN_ERR_INVALID);  // odd N
}

TEST_CASE("exact values through the C interface") {
    gdyn_source* s = nullptr;
    REQUIRE(gdyn_source_ginibre(2, &s) == GDYN_OK);
    double v = 0;
    REQUIRE(gdyn_exact_correlator(2, 1.0, 0.0, 0.0, s, &v) == GDYN_OK);
    CHECK(v == doctest::Approx(1.0 / M_PI).epsilon(1e-12));
    const double r = std::sqrt(0.3);
    REQUIRE(gdyn_exact_correlator(2, 1.0, r, 0.0, s, &v) == GDYN_OK);
    CHECK(v == doctest::Approx(0.22709982024785835).epsilon(1e-12));
    REQUIRE(gdyn_exact_density(2, 1.0, r, 0.0, s, &v) == GDYN_OK);
    CHECK(v == doctest::Approx(0.2795074710742872).epsilon(1e-6));
    CHECK(gdyn_exact_correlator(2, -1.0, 0, 0, s, &v) == GDYN_ERR_INVALID);
    gdyn_source_free(s);
}

TEST_CASE("asymptotic laws through the C interface") {
    double v = 0;
    REQUIRE(gdyn_edge_law(0.0, 1.0, &v) == GDYN_OK);
    CHECK(v == doctest::Approx(0.12698727186848194).epsilon(1e-13));
    REQUIRE(gdyn_collision_law(0.0, 0.0, 0.0, 1.0, 0.0, &v) == GDYN_OK);
    CHECK(v == doctest::Approx(0.12698727186848194).epsilon(1e-13));
    int inside = -1;
    REQUIRE(gdyn_spiric_inside(0.9, 0.8, 0.0, 0.0, 0.0, &inside) == GDYN_OK);
    CHECK(inside == 1);
    REQUIRE(gdyn_spiric_inside(0.3, 0.8, 0.0, 0.0, 0.0, &inside) == GDYN_OK);
    CHECK(inside == 0);
    gdyn_source* s = nullptr;
    REQUIRE(gdyn_source_ginibre(3, &s) == GDYN_OK);
    REQUIRE(gdyn_macro_correlator(1.0, 0.5, 0.0, s, &v) == GDYN_OK);
    CHECK(v == doctest::Approx(0.75 / M_PI).epsilon(1e-12));
    gdyn_source_free(s);
}

TEST_CASE("grids round-trip through the C interface") {
    TempDir dir("gdyn_capi_grid");
    gdyn_source* s = nullptr;
    REQUIRE(gdyn_source_ginibre(2, &s) == GDYN_OK);
    gdyn_grid* g = nullptr;
    REQUIRE(gdyn_exact_grid("correlator", 2, 1.0, s, {-1, 1, -1, 1}, 4, 3, &g) == GDYN_OK);
    CHECK(gdyn_grid_nx(g) == 4);
    CHECK(gdyn_grid_ny(g) == 3);
    const std::string path = dir.file("grid.csv");
    REQUIRE(gdyn_grid_write_csv(g, path.c_str()) == GDYN_OK);
    gdyn_grid* back = nullptr;
    REQUIRE(gdyn_grid_read_csv(path.c_str(), &back) == GDYN_OK);
    for (int iy = 0; iy < 3; ++iy)
        for (int ix = 0; ix < 4; ++ix)
            CHECK(gdyn_grid_value(back, ix, iy) == gdyn_grid_value(g, ix, iy));
    gdyn_grid_free(g);
    gdyn_grid_free(back);
    gdyn_source_free(s);
}

TEST_CASE("pole collisions become missing values on grids") {
    gdyn_source* s = nullptr;
    REQUIRE(gdyn_source_parse("0.5,0.5;-0.5,-0.5", &s) == GDYN_OK);
    gdyn_grid* g = nullptr;
    // 2x2 grid with bin centers exactly on the source atoms
    REQUIRE(gdyn_exact_grid("correlator", 2, 1.0, s, {-1, 1, -1, 1}, 2, 2, &g) == GDYN_OK);
    CHECK(std::isnan(gdyn_grid_value(g, 1, 1)));  // center (0.5, 0.5)
    CHECK(std::isfinite(gdyn_grid_value(g, 0, 1)));
    gdyn_grid_free(g);
    gdyn_source_free(s);
}

TEST_CASE("simulation through the C interface is deterministic") {
    TempDir dir("gdyn_capi_sim");
    gdyn_source* s = nullptr;
    REQUIRE(gdyn_source_ginibre(3, &s) == GDYN_OK);
    gdyn_sim_config cfg{};
    cfg.n = 3;
    cfg.scheme = "matrix-bm";
    cfg.dt = 1e-3;
    cfg.steps = 20;
    cfg.seed = 5;
    cfg.variance_rate = 1.0;
    cfg.snapshot_every = 5;
    const std::string p1 = dir.file("a.csv"), p2 = dir.file("b.csv");
    REQUIRE(gdyn_simulate(&cfg, s, p1.c_str()) == GDYN_OK);
    REQUIRE(gdyn_simulate(&cfg, s, p2.c_str()) == GDYN_OK);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(slurp(p1).substr(0, 24) == "step,time,index,re,im\n0,");
    cfg.scheme = "warp-drive";
    CHECK(gdyn_simulate(&cfg, s, p1.c_str()) == GDYN_ERR_INVALID);
    gdyn_source_free(s);
}

TEST_CASE("verification suites through the C interface") {
    TempDir dir("gdyn_capi_verify");
    CHECK(gdyn_verify("identities", 1, 10, 0, dir.p.string().c_str()) == GDYN_OK);
    CHECK(fs::exists(dir.p / "report_identities.txt"));
    CHECK(gdyn_verify("no-such-suite", 1, 10, 0, dir.p.string().c_str()) == GDYN_ERR_INVALID);
}

TEST_CASE("cli: exit codes") {
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("definitely-not-a-subcommand") == 1);
    TempDir dir("gdyn_cli_runs");
    CHECK(run_cli("exact --quantity correlator --n 2 --tau 1 --nx 3 --ny 3 --out-dir " +
                  dir.p.string()) == 0);
    CHECK(fs::exists(dir.p / "exact_correlator.csv"));
    CHECK(fs::exists(dir.p / "manifest.json"));
    // validation error -> 1
    CHECK(run_cli("exact --quantity nonsense --out-dir " + dir.p.string()) == 1);
    CHECK(run_cli("verify no-such-suite --out-dir " + dir.p.string()) == 1);
    // numerical failure (degenerate start for the eigenvector scheme) -> 2
    CHECK(run_cli("simulate --scheme dyson --n 3 --steps 5 --out-dir " + dir.p.string()) == 2);
}

TEST_CASE("cli: repeated runs are byte-identical") {
    TempDir d1("gdyn_cli_rep1"), d2("gdyn_cli_rep2");
    const std::string args = "simulate --scheme coulomb --n 6 --dt 1e-3 --steps 50 --seed 9 "
                             "--source '0.3,0;-0.3,0;0,0.3;0,-0.3;0.6,0;-0.6,0' --out-dir ";
    CHECK(run_cli(args + d1.p.string()) == 0);
    CHECK(run_cli(args + d2.p.string()) == 0);
    CHECK(slurp(d1.file("snapshots_traj0.csv")) == slurp(d2.file("snapshots_traj0.csv")));
    CHECK(!slurp(d1.file("snapshots_traj0.csv")).empty());
}

TEST_CASE("cli: config file with flag overrides") {
    TempDir dir("gdyn_cli_cfg");
    {
        std::ofstream cfg(dir.file("run.cfg"));
        cfg << "out-dir=" << dir.p.string() << "\n";
        cfg << "exact.quantity=correlator\nexact.n=2\nexact.tau=1.0\n"
            << "exact.nx=3\nexact.ny=3\n";
    }
    CHECK(run_cli("exact --config " + dir.file("run.cfg")) == 0);
    CHECK(fs::exists(dir.p / "exact_correlator.csv"));
    // flag overrides the file value
    CHECK(run_cli("exact --config " + dir.file("run.cfg") + " --quantity density") == 0);
    CHECK(fs::exists(dir.p / "exact_density.csv"));
}
