#include "app.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#include "sfp.hpp"

namespace gdyn {

int thread_count() {
    if (const char* env = std::getenv("GDYN_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void parallel_for(long count, const std::function<void(long)>& f) {
    const int workers = std::min<long>(thread_count(), count);
    if (workers <= 1) {
        for (long i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (long i = next.fetch_add(1); i < count; i = next.fetch_add(1)) f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot hash missing file " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    char hex[2 * EVP_MAX_MD_SIZE + 1];
    for (unsigned i = 0; i < len; ++i) std::snprintf(hex + 2 * i, 3, "%02x", digest[i]);
    return std::string(hex, 2 * len);
}

void write_manifest(const std::string& path, const Manifest& m) {
    nlohmann::json j;
    j["command_line"] = m.command_line;
    j["config"] = m.config;
    j["seed"] = m.seed;
    j["version"] = kVersion;
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    j["written_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& p : m.outputs) outs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    j["outputs"] = outs;

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) fail(errc::io_error, "cannot write manifest " + tmp);
        out << j.dump(2) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        fail(errc::io_error, "cannot move manifest into place: " + path);
}

void write_snapshots_csv(const std::string& path, const std::vector<TrajectorySnapshot>& snaps) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) fail(errc::io_error, "cannot open " + path);
    std::fputs("step,time,index,re,im\n", f);
    for (const auto& s : snaps)
        for (int i = 0; i < s.lambdas.size(); ++i)
            std::fprintf(f, "%ld,%.17g,%d,%.17g,%.17g\n", s.step, s.time, i,
                         s.lambdas[i].real(), s.lambdas[i].imag());
    if (std::fclose(f) != 0) fail(errc::io_error, "write failed: " + path);
}

void write_matrix_binary(const std::string& path, const Matrix& m) {
    if (m.rows() != m.cols()) fail(errc::invalid_argument, "matrix dump must be square");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) fail(errc::io_error, "cannot open " + path);
    const char magic[4] = {'G', 'D', 'Y', 'N'};
    const unsigned char version = 1;
    const std::uint32_t n = static_cast<std::uint32_t>(m.rows());
    std::fwrite(magic, 1, 4, f);
    std::fwrite(&version, 1, 1, f);
    std::fwrite(&n, 4, 1, f);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            const double re = m(i, j).real(), im = m(i, j).imag();
            std::fwrite(&re, 8, 1, f);
            std::fwrite(&im, 8, 1, f);
        }
    if (std::fclose(f) != 0) fail(errc::io_error, "write failed: " + path);
}

Matrix read_matrix_binary(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) fail(errc::io_error, "cannot open " + path);
    char magic[4];
    unsigned char version;
    std::uint32_t n;
    if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "GDYN", 4) != 0 ||
        std::fread(&version, 1, 1, f) != 1 || version != 1 || std::fread(&n, 4, 1, f) != 1) {
        std::fclose(f);
        fail(errc::io_error, "bad matrix container header: " + path);
    }
    Matrix m(n, n);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j) {
            double re, im;
            if (std::fread(&re, 8, 1, f) != 1 || std::fread(&im, 8, 1, f) != 1) {
                std::fclose(f);
                fail(errc::io_error, "truncated matrix container: " + path);
            }
            m(i, j) = Complex(re, im);
        }
    std::fclose(f);
    return m;
}

double ks_semicircle(std::vector<double> xs) {
    if (xs.empty()) fail(errc::invalid_argument, "ks_semicircle: empty sample");
    std::sort(xs.begin(), xs.end());
    auto cdf = [](double x) {
        if (x <= -1) return 0.0;
        if (x >= 1) return 1.0;
        return 0.5 + (x * std::sqrt(1 - x * x) + std::asin(x)) / M_PI;
    };
    double ks = 0;
    const double inv = 1.0 / xs.size();
    for (size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        ks = std::max({ks, std::abs(f - i * inv), std::abs(f - (i + 1) * inv)});
    }
    return ks;
}

double ks_circular(std::vector<double> moduli, double radius) {
    if (moduli.empty() || radius <= 0) fail(errc::invalid_argument, "ks_circular: bad input");
    std::sort(moduli.begin(), moduli.end());
    auto cdf = [radius](double r) {
        if (r <= 0) return 0.0;
        if (r >= radius) return 1.0;
        return r * r / (radius * radius);
    };
    double ks = 0;
    const double inv = 1.0 / moduli.size();
    for (size_t i = 0; i < moduli.size(); ++i) {
        const double f = cdf(moduli[i]);
        ks = std::max({ks, std::abs(f - i * inv), std::abs(f - (i + 1) * inv)});
    }
    return ks;
}

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(errc::io_error, "cannot create " + dir + ": " + ec.message());
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::MatrixBM: return "matrix-bm";
        case Scheme::MatrixOU: return "matrix-ou";
        case Scheme::DysonSDE: return "dyson";
        case Scheme::Coulomb: return "coulomb";
    }
    return "?";
}

void write_gnuplot(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) fail(errc::io_error, "cannot write " + path);
    out << "# gnuplot script\n" << body;
}

// Histogram of values on [lo, hi), normalized as a density.
void write_histogram_csv(const std::string& path, const std::vector<double>& xs, double lo,
                         double hi, int bins) {
    std::vector<long> counts(bins, 0);
    long total = 0;
    for (double x : xs) {
        if (x < lo || x >= hi) continue;
        ++counts[static_cast<int>((x - lo) / (hi - lo) * bins)];
        ++total;
    }
    const double width = (hi - lo) / bins;
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) fail(errc::io_error, "cannot open " + path);
    std::fputs("x,density\n", f);
    for (int b = 0; b < bins; ++b)
        std::fprintf(f, "%.17g,%.17g\n", lo + (b + 0.5) * width,
                     total ? counts[b] / (total * width) : 0.0);
    if (std::fclose(f) != 0) fail(errc::io_error, "write failed: " + path);
}

}  // namespace

void cmd_simulate(const SimulateOpts& opts) {
    Manifest man;
    man.command_line = opts.common.command_line;
    man.seed = opts.config.seed;
    man.config = {{"scheme", scheme_name(opts.config.scheme)},
                  {"n", std::to_string(opts.config.n)},
                  {"dt", std::to_string(opts.config.dt)},
                  {"steps", std::to_string(opts.config.steps)},
                  {"snapshot_every", std::to_string(opts.config.snapshot_every)},
                  {"source", opts.config.source.to_string()},
                  {"variance_rate", std::to_string(opts.config.convention.variance_rate)},
                  {"drift_coeff", std::to_string(opts.config.convention.drift_coeff)},
                  {"trajectories", std::to_string(opts.trajectories)}};

    std::vector<std::vector<TrajectorySnapshot>> all(opts.trajectories);
    parallel_for(opts.trajectories,
                 [&](long k) { all[k] = run_trajectory(opts.config, static_cast<uint64_t>(k)); });

    for (long k = 0; k < opts.trajectories; ++k) {
        const std::string csv =
            join_path(opts.common.out_dir, "snapshots_traj" + std::to_string(k) + ".csv");
        write_snapshots_csv(csv, all[k]);
        man.outputs.push_back(csv);
        if (opts.dump_matrices && all[k].back().x) {
            const std::string bin =
                join_path(opts.common.out_dir, "final_traj" + std::to_string(k) + ".gdyn");
            write_matrix_binary(bin, *all[k].back().x);
            man.outputs.push_back(bin);
        }
    }
    if (opts.common.gnuplot) {
        const std::string gp = join_path(opts.common.out_dir, "snapshots.gp");
        write_gnuplot(gp,
                      "set datafile separator ','\nset size square\n"
                      "plot 'snapshots_traj0.csv' using 4:5 every ::1 with points pt 7 ps 0.3 "
                      "title 'eigenvalues'\npause -1\n");
        man.outputs.push_back(gp);
    }
    write_manifest(join_path(opts.common.out_dir, "manifest.json"), man);
}

void cmd_exact(const ExactCmdOpts& opts) {
    if (opts.quantity != "correlator" && opts.quantity != "density")
        fail(errc::invalid_argument, "exact: quantity must be correlator or density");
    if (opts.source.total() != opts.n)
        fail(errc::invalid_argument, "exact: source size does not match n");

    FieldGrid g(opts.window, opts.nx, opts.ny);
    g.meta.estimator = "exact_" + opts.quantity;
    g.meta.n = opts.n;
    g.meta.tau = opts.tau;
    const bool uniform = opts.source.entries.size() == 1;
    std::vector<double> cross(g.values.size(), 0.0);

    parallel_for(static_cast<long>(g.values.size()), [&](long cell) {
        const int ix = static_cast<int>(cell % g.nx), iy = static_cast<int>(cell / g.nx);
        const Complex z = g.center(ix, iy);
        try {
            double v;
            if (uniform) {
                // Single source value: the translated null-source closed forms
                // hold everywhere, including on top of the source itself.
                const double r2 = std::norm(z - opts.source.entries[0].first);
                v = opts.quantity == "correlator" ? ginibre_closed_sum(opts.n, opts.tau, r2)
                                                  : ginibre_density_closed(opts.n, opts.tau, r2);
                if (opts.cross_check && opts.quantity == "correlator")
                    cross[cell] = std::abs(
                        v - correlator_double_contour(opts.n, opts.tau, z, opts.source));
            } else if (opts.quantity == "correlator") {
                v = correlator_beta_form(opts.n, opts.tau, z, opts.source);
                if (opts.cross_check)
                    cross[cell] = std::abs(
                        v - correlator_double_contour(opts.n, opts.tau, z, opts.source));
            } else {
                v = density_source(opts.n, opts.tau, z, opts.source);
            }
            g.values[cell] = v;
        } catch (const Error& e) {
            if (e.code() == errc::pole_collision) {
                // Missing value, not a run failure.
                g.values[cell] = std::nan("");
                g.stderrs[cell] = std::nan("");
            } else {
                throw;
            }
        }
    });

    Manifest man;
    man.command_line = opts.common.command_line;
    man.config = {{"quantity", opts.quantity},
                  {"n", std::to_string(opts.n)},
                  {"tau", std::to_string(opts.tau)},
                  {"source", opts.source.to_string()}};
    if (opts.cross_check) {
        double worst = 0;
        for (double c : cross)
            if (std::isfinite(c)) worst = std::max(worst, c);
        man.config["cross_check_max_discrepancy"] = std::to_string(worst);
        std::printf("cross-check max discrepancy: %.3e\n", worst);
    }
    const std::string csv = join_path(opts.common.out_dir, "exact_" + opts.quantity + ".csv");
    g.write_csv(csv);
    man.outputs = {csv, csv + ".json"};
    if (opts.common.gnuplot) {
        const std::string gp = join_path(opts.common.out_dir, "exact.gp");
        write_gnuplot(gp, "set datafile separator ','\nset view map\n"
                          "splot 'exact_" + opts.quantity +
                              ".csv' using 1:2:3 every ::1 with points palette pt 5 notitle\n"
                              "pause -1\n");
        man.outputs.push_back(gp);
    }
    write_manifest(join_path(opts.common.out_dir, "manifest.json"), man);
}

void cmd_asymptotic(const AsymptoticOpts& opts) {
    FieldGrid g(opts.window, opts.nx, opts.ny);
    g.meta.estimator = "asymptotic_" + opts.law;
    g.meta.tau = opts.tau;
    if (opts.law == "macro" && opts.source.entries.empty())
        fail(errc::invalid_argument, "asymptotic: the macro law needs a source");
    if (opts.law == "macro" || opts.law == "spiric") {
        parallel_for(static_cast<long>(g.values.size()), [&](long cell) {
            const Complex z = g.center(static_cast<int>(cell % g.nx),
                                       static_cast<int>(cell / g.nx));
            g.values[cell] = opts.law == "macro" ? macro_O(opts.tau, z, opts.source)
                                                 : macro_spiric(opts.tau, opts.a, z);
        });
    } else if (opts.law == "edge") {
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                g.at(ix, iy) = edge_micro_law(g.center(ix, iy).real(), opts.tau);
    } else if (opts.law == "collision") {
        parallel_for(static_cast<long>(g.values.size()), [&](long cell) {
            const Complex eta = g.center(static_cast<int>(cell % g.nx),
                                         static_cast<int>(cell / g.nx));
            g.values[cell] = collision_micro_law(eta, opts.tau, opts.a);
        });
    } else {
        fail(errc::invalid_argument, "asymptotic: unknown law '" + opts.law + "'");
    }
    const std::string csv = join_path(opts.common.out_dir, "asymptotic_" + opts.law + ".csv");
    g.write_csv(csv);
    Manifest man;
    man.command_line = opts.common.command_line;
    man.config = {{"law", opts.law},
                  {"tau", std::to_string(opts.tau)},
                  {"a", std::to_string(opts.a.real()) + "," + std::to_string(opts.a.imag())}};
    man.outputs = {csv, csv + ".json"};
    write_manifest(join_path(opts.common.out_dir, "manifest.json"), man);
}

void cmd_compare_fig1(const Fig1Opts& opts) {
    if (opts.n < 2 || opts.n % 2 != 0)
        fail(errc::invalid_argument, "compare-fig1: n must be even and >= 2");

    SimConfig coulomb;
    coulomb.n = opts.n;
    coulomb.scheme = Scheme::Coulomb;
    coulomb.dt = opts.dt;
    coulomb.steps = opts.steps;
    coulomb.seed = opts.seed;
    coulomb.convention = NoiseConvention::coulomb_gas(opts.n);
    coulomb.snapshot_every = opts.snapshot_every;
    // Symmetric spread of starting positions (the dynamics forgets it quickly,
    // but degenerate starts would stall the Coulomb step).
    SourceSpec start;
    for (int i = 0; i < opts.n; ++i)
        start.entries.push_back({Complex(0.02 * (i - opts.n / 2.0), 0.013 * (i % 7 - 3)), 1});
    coulomb.source = start;

    SimConfig ou = coulomb;
    ou.scheme = Scheme::MatrixOU;
    ou.convention = NoiseConvention::unit_disk_ou(opts.n);
    ou.source = SourceSpec::ginibre(opts.n);
    // Start in the stationary law (entry variance 1/N, spectral radius 1) so
    // the run does not have to burn relaxation time 1/drift first.
    Matrix x0(opts.n, opts.n);
    Rng init_rng(opts.seed, 2);
    const double s0 = 1.0 / std::sqrt(static_cast<double>(opts.n));
    for (int i = 0; i < opts.n; ++i)
        for (int j = 0; j < opts.n; ++j) x0(i, j) = s0 * init_rng.normal_complex();
    ou.x0 = x0;

    std::vector<TrajectorySnapshot> snap_coulomb, snap_ou;
    parallel_for(2, [&](long k) {
        if (k == 0)
            snap_coulomb = run_trajectory(coulomb, 0);
        else
            snap_ou = run_trajectory(ou, 1);
    });

    Manifest man;
    man.command_line = opts.common.command_line;
    man.seed = opts.seed;
    man.config = {{"n", std::to_string(opts.n)},
                  {"steps", std::to_string(opts.steps)},
                  {"dt", std::to_string(opts.dt)},
                  {"snapshot_every", std::to_string(opts.snapshot_every)}};

    auto emit = [&](const char* tag, const std::vector<TrajectorySnapshot>& snaps) {
        const std::string traj = join_path(opts.common.out_dir,
                                           std::string("trajectories_") + tag + ".csv");
        write_snapshots_csv(traj, snaps);
        man.outputs.push_back(traj);
        // Real-part histogram over the last 40 snapshots.
        std::vector<double> xs;
        const size_t first = snaps.size() > 40 ? snaps.size() - 40 : 0;
        for (size_t s = first; s < snaps.size(); ++s)
            for (int i = 0; i < snaps[s].lambdas.size(); ++i)
                xs.push_back(snaps[s].lambdas[i].real());
        const std::string hist = join_path(opts.common.out_dir,
                                           std::string("hist_") + tag + ".csv");
        write_histogram_csv(hist, xs, -1.2, 1.2, 40);
        man.outputs.push_back(hist);
        man.config[std::string("ks_semicircle_") + tag] = std::to_string(ks_semicircle(xs));
    };
    emit("coulomb", snap_coulomb);
    emit("matrix_ou", snap_ou);

    if (opts.common.gnuplot) {
        const std::string gp = join_path(opts.common.out_dir, "fig1.gp");
        write_gnuplot(gp,
                      "set datafile separator ','\n"
                      "set multiplot layout 1,2\n"
                      "plot 'hist_coulomb.csv' using 1:2 every ::1 with boxes title 'coulomb', "
                      "0.63662*sqrt(1-x**2) title 'semicircle'\n"
                      "plot 'hist_matrix_ou.csv' using 1:2 every ::1 with boxes title 'matrix OU', "
                      "0.63662*sqrt(1-x**2) title 'semicircle'\n"
                      "unset multiplot\npause -1\n");
        man.outputs.push_back(gp);
    }
    write_manifest(join_path(opts.common.out_dir, "manifest.json"), man);
}

// --- verify suites ---------------------------------------------------------

namespace {

void suite_identities(const VerifyOpts& opts, std::vector<CheckRow>& rows) {
    Rng rng(opts.seed, 0);
    const int points = opts.points > 0 ? opts.points : 100;
    double worst_tq = 0, worst_td1 = 0, worst_td2 = 0;
    for (int k = 0; k < points; ++k) {
        const int n = 2 + k % 5;
        const SfpPoint p = sample_sfp_point(n, rng);
        worst_tq = std::max(worst_tq, check_TQ(p));
        const auto [b1, b2] = check_TdQ(p);
        worst_td1 = std::max(worst_td1, b1);
        worst_td2 = std::max(worst_td2, b2);
    }
    rows.push_back({"TQ_cancellation", 6, worst_tq, 1e-10, worst_tq < 1e-10});
    rows.push_back({"TdQ_bracket1", 6, worst_td1, 1e-10, worst_td1 < 1e-10});
    rows.push_back({"TdQ_bracket2", 6, worst_td2, 1e-10, worst_td2 < 1e-10});

    double worst_der = 0;
    // cap the eigenvector condition number: the FD truncation error grows
    // like (cond^2 h)^2 and would swamp the comparison on skewed draws
    for (int k = 0; k < std::min(points, 20); ++k)
        worst_der =
            std::max(worst_der, check_derivative_ids(sample_sfp_point(2 + k % 2, rng, 20.0)));
    rows.push_back({"derivative_identities", 3, worst_der, 1e-6, worst_der < 1e-6});

    double worst_q = 0;
    for (int k = 0; k < 10; ++k) {
        // tight conditioning and a healthy eigenvalue gap: FD truncation grows
        // like (cond^2 h)^2 and the coefficient cancellations like 1/gap^4
        SfpPoint p = sample_sfp_point(2, rng, 4.0);
        while (p.dec.min_gap < 0.3) p = sample_sfp_point(2, rng, 4.0);
        Matrix x0 = reconstruct(p.dec);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) x0(i, j) += 0.3 * rng.normal_complex();
        worst_q = std::max(worst_q, check_Q_solution(0.5, p, x0, 3e-5));
    }
    rows.push_back({"Q_solution_residual", 2, worst_q, 1e-4, worst_q < 1e-4});
}

void suite_covariances(const VerifyOpts& opts, std::vector<CheckRow>& rows) {
    Rng rng(opts.seed, 1);
    const int points = opts.points > 0 ? opts.points : 20;
    double worst = 0;
    for (int k = 0; k < points; ++k) {
        const int n = 2 + k % 2;
        const SfpPoint p = sample_sfp_point(n, rng);
        worst = std::max(worst, check_covariances(p, 100000, 1e-4, rng));
    }
    rows.push_back({"ito_covariances_sigma", 3, worst, 4.0, worst < 4.0});
}

void suite_ecp(const VerifyOpts& opts, std::vector<CheckRow>& rows) {
    Rng rng(opts.seed, 2);
    double worst_dual = 0;
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + k % 7;
        Matrix x(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) x(i, j) = rng.normal_complex();
        const Complex z(rng.normal(), rng.normal()), w(rng.normal(), rng.normal());
        const double d1 = ecp_value(x, z, w);
        const double d2 = ecp_block_value(x, z, w);
        worst_dual = std::max(worst_dual, std::abs(d1 - d2) / std::max(std::abs(d1), 1e-300));
    }
    rows.push_back({"ecp_dual_representation", 8, worst_dual, 1e-8, worst_dual < 1e-8});

    const int n = opts.n > 0 ? opts.n : 3;
    SimConfig cfg;
    cfg.n = n;
    cfg.scheme = Scheme::MatrixBM;
    cfg.dt = 0.01;
    cfg.seed = opts.seed;
    cfg.source = SourceSpec{{{Complex(0.2, -0.1), n}}};
    const long traj = n == 1 ? 4000 : 10000;
    const auto res = ecp_heat_residual(cfg, Complex(0.3, 0.2), {0.4, 0.6, 0.8, 1.0, 1.2},
                                       {0.1, 0.2, 0.3}, traj);
    double worst_sigma = 0;
    for (size_t c = 0; c < res.residual.size(); ++c)
        worst_sigma = std::max(worst_sigma, std::abs(res.residual[c]) / res.stderrs[c]);
    rows.push_back({"ecp_heat_residual_sigma", n, worst_sigma, 3.0, worst_sigma < 3.0});
}

void suite_hierarchy(const VerifyOpts& opts, std::vector<CheckRow>& rows) {
    const int n = opts.n > 0 ? opts.n : 4;
    const Window win{-0.6, 0.6, -0.6, 0.6};
    const int g = 9;

    // Both discretization errors (tau step and z spacing) are O(h^2); halving
    // them together should show second order overall.
    auto build = [&](double tau_mid, double h, int gg) {
        std::vector<double> taus = {tau_mid - h, tau_mid, tau_mid + h};
        std::vector<FieldGrid> rho, o;
        for (double tau : taus) {
            FieldGrid r(win, gg, gg), oo(win, gg, gg);
            for (int iy = 0; iy < gg; ++iy)
                for (int ix = 0; ix < gg; ++ix) {
                    const double r2 = std::norm(r.center(ix, iy));
                    r.at(ix, iy) = ginibre_density_closed(n, tau, r2);
                    oo.at(ix, iy) = ginibre_closed_sum(n, tau, r2);
                }
            rho.push_back(std::move(r));
            o.push_back(std::move(oo));
        }
        const auto res = hierarchy_residual(taus, rho, o);
        double worst = 0;
        for (double v : res[0].values) worst = std::max(worst, std::abs(v));
        return worst;
    };
    const double r1 = build(1.0, 0.1, g);
    const double r2 = build(1.0, 0.05, 2 * g);
    const double order = std::log2(r1 / r2);
    rows.push_back({"hierarchy_fd_order", n, order, 2.0, order >= 1.7});
    rows.push_back({"hierarchy_residual", n, r2, 0.01, r2 < 0.01});

    // Bulk closed forms: the z-stencil is exact on the quadratic O field, so
    // the discrete d_zzbar equals -1/(pi tau^2) to rounding.
    const double tau = 1.0;
    FieldGrid o_bulk(win, g, g);
    for (int iy = 0; iy < g; ++iy)
        for (int ix = 0; ix < g; ++ix)
            o_bulk.at(ix, iy) = (tau - std::norm(o_bulk.center(ix, iy))) / (M_PI * tau * tau);
    const double cx = 1.0 / (o_bulk.dx() * o_bulk.dx());
    double worst_bulk = 0;
    for (int iy = 1; iy + 1 < g; ++iy)
        for (int ix = 1; ix + 1 < g; ++ix) {
            const double lap =
                cx * (o_bulk.at(ix + 1, iy) - 2 * o_bulk.at(ix, iy) + o_bulk.at(ix - 1, iy)) +
                cx * (o_bulk.at(ix, iy + 1) - 2 * o_bulk.at(ix, iy) + o_bulk.at(ix, iy - 1));
            worst_bulk = std::max(worst_bulk, std::abs(0.25 * lap + 1.0 / (M_PI * tau * tau)));
        }
    rows.push_back({"hierarchy_bulk_exact", 0, worst_bulk, 1e-12, worst_bulk < 1e-12});
}

void suite_integrators(const VerifyOpts& opts, std::vector<CheckRow>& rows) {
    // One-step variance of the raw diffusion, N = 1.
    {
        Rng rng(opts.seed, 3);
        const long m = 100000;
        const double dt = 0.5;
        double sum = 0, sumsq = 0;
        for (long k = 0; k < m; ++k) {
            const double v = std::norm(std::sqrt(dt) * rng.normal_complex());
            sum += v;
            sumsq += v * v;
        }
        const double mean = sum / m;
        const double se = std::sqrt((sumsq / m - mean * mean) / m);
        const double sigma = std::abs(mean - dt) / se;
        rows.push_back({"raw_diffusion_variance_sigma", 1, sigma, 3.0, sigma < 3.0});
    }
    // Coupled-noise Dyson vs direct diagonalization, one step from a fixed
    // well-conditioned point. Both dt values use the same Gaussians (the
    // coarse increment is the fine one rescaled), so the leading mismatch is
    // the second-order perturbation term, linear in dt.
    {
        const int n = 8;
        Vector a0(n);
        for (int i = 0; i < n; ++i) a0[i] = std::polar(1.0, 2.0 * M_PI * i / n);
        Rng srng(opts.seed, 4);
        Matrix s0 = Matrix::Identity(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s0(i, j) += 0.3 * srng.normal_complex();
        const SfpPoint point = make_sfp_point(a0, s0);
        const Matrix x_before = reconstruct(point.dec);
        auto mismatch = [&](double dt, Rng& r) {
            TrajectoryState st;
            st.dec = point.dec;
            const Matrix dx = draw_increment(n, 1.0, dt, r);
            step_dyson(st, dx, dt, 1e-12);
            const auto direct = eigendecompose(x_before + dx, 1e-12);
            const auto perm = match_eigenvalues(st.dec->lambdas, direct.lambdas);
            double worst = 0;
            for (int i = 0; i < n; ++i)
                worst = std::max(worst,
                                 std::abs(st.dec->lambdas[i] - direct.lambdas[perm[i]]));
            return worst;
        };
        double m1 = 0, m2 = 0;
        const int trials = 20;
        for (int k = 0; k < trials; ++k) {
            Rng shared(opts.seed, 100 + k);
            Rng shared2(opts.seed, 100 + k);
            m1 += mismatch(1e-3, shared) / trials;
            m2 += mismatch(1e-4, shared2) / trials;
        }
        const double order = std::log10(m1 / m2);
        rows.push_back({"dyson_direct_order", 8, order, 1.0, order >= 1.0});
        rows.push_back({"dyson_direct_mismatch_at_1e-3", 8, m1, 5e-2, m1 < 5e-2});
    }
    // Circular law for matrix Brownian motion at tau = N t = 1. N = 200 keeps
    // the finite-N edge smoothing well below the KS tolerance.
    {
        const int n = 200;
        SimConfig cfg;
        cfg.n = n;
        cfg.scheme = Scheme::MatrixBM;
        cfg.dt = 1.0 / n / 4;
        cfg.steps = 4;
        cfg.seed = opts.seed;
        cfg.snapshot_every = 4;
        cfg.source = SourceSpec::ginibre(n);
        std::vector<double> moduli;
        std::vector<std::vector<TrajectorySnapshot>> runs(20);
        parallel_for(20, [&](long k) { runs[k] = run_trajectory(cfg, static_cast<uint64_t>(k)); });
        for (const auto& snaps : runs)
            for (int i = 0; i < n; ++i) moduli.push_back(std::abs(snaps.back().lambdas[i]));
        const double ks = ks_circular(moduli, 1.0);
        rows.push_back({"circular_law_ks", n, ks, 0.05, ks < 0.05});
    }
    // Determinism across thread counts is structural (per-trajectory streams,
    // index-ordered reduction); spot-check two repeated runs bit-for-bit.
    {
        SimConfig cfg;
        cfg.n = 4;
        cfg.scheme = Scheme::MatrixBM;
        cfg.dt = 1e-3;
        cfg.steps = 50;
        cfg.seed = opts.seed;
        cfg.source = SourceSpec::ginibre(4);
        const auto r1 = run_trajectory(cfg, 0);
        const auto r2 = run_trajectory(cfg, 0);
        bool same = r1.size() == r2.size();
        for (size_t s = 0; same && s < r1.size(); ++s)
            same = (r1[s].lambdas.array() == r2[s].lambdas.array()).all();
        rows.push_back({"determinism_bit_exact", 4, same ? 0.0 : 1.0, 0.5, same});
    }
}

}  // namespace

std::vector<CheckRow> run_verify(const VerifyOpts& opts) {
    std::vector<CheckRow> rows;
    if (opts.suite == "identities")
        suite_identities(opts, rows);
    else if (opts.suite == "covariances")
        suite_covariances(opts, rows);
    else if (opts.suite == "ecp")
        suite_ecp(opts, rows);
    else if (opts.suite == "hierarchy")
        suite_hierarchy(opts, rows);
    else if (opts.suite == "integrators")
        suite_integrators(opts, rows);
    else
        fail(errc::invalid_argument, "verify: unknown suite '" + opts.suite + "'");

    const std::string txt = join_path(opts.common.out_dir, "report_" + opts.suite + ".txt");
    const std::string csv = join_path(opts.common.out_dir, "report_" + opts.suite + ".csv");
    std::FILE* ft = std::fopen(txt.c_str(), "w");
    std::FILE* fc = std::fopen(csv.c_str(), "w");
    if (!ft || !fc) fail(errc::io_error, "cannot write verify reports");
    std::fprintf(fc, "name,n,residual,tolerance,pass\n");
    for (const auto& r : rows) {
        std::fprintf(ft, "%-32s N=%-3d residual=%-12.4e tol=%-10.2e %s\n", r.name.c_str(), r.n,
                     r.residual, r.tolerance, r.pass ? "PASS" : "FAIL");
        std::fprintf(fc, "%s,%d,%.17g,%.17g,%d\n", r.name.c_str(), r.n, r.residual, r.tolerance,
                     r.pass ? 1 : 0);
    }
    std::fclose(ft);
    std::fclose(fc);

    Manifest man;
    man.command_line = opts.common.command_line;
    man.seed = opts.seed;
    man.config = {{"suite", opts.suite}, {"points", std::to_string(opts.points)}};
    man.outputs = {txt, csv};
    write_manifest(join_path(opts.common.out_dir, "manifest_verify.json"), man);
    return rows;
}

}  // namespace gdyn
