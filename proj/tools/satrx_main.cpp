// SPDX-License-Identifier: Apache-2.0
//
// satrx command-line front end.
//
// Exit codes: 0 success, 1 usage, 2 config error, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "satrx/io.hpp"
#include "satrx/rng.hpp"

namespace {

using namespace satrx;

SimConfig load_config(const std::string& path, std::string* raw_bytes) {
    if (path.empty()) {
        if (raw_bytes) raw_bytes->clear();
        return SimConfig::paper_default();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (raw_bytes) *raw_bytes = buf.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config_json(j);
}

int cmd_complexity(const std::string& modulation, int list_size) {
    const int m = 3, n = 5;
    const std::vector<int> groups = {3, 2};
    int k;
    const std::vector<IterationSet>* sets;
    if (modulation == "8psk") {
        k = 8;
        sets = &table1_iteration_sets();
    } else if (modulation == "16apsk") {
        k = 16;
        sets = &table2_iteration_sets();
    } else {
        std::cerr << "complexity: modulation must be 8psk or 16apsk\n";
        return 1;
    }
    auto cj = c_jml(m, n, k);
    std::printf("# %s, M=%d, N=%d, L=%d, groups {3,2}, nominal convention (L_v=L, R=0)\n",
                modulation.c_str(), m, n, list_size);
    std::printf("%-10s %14s %14s %8s %14s %15s\n", "config", "C_nominal", "C_JML", "C_RC%",
                "C_save_exact%", "C_save_approx%");
    for (const auto& it : *sets) {
        auto cm = closed_form_c_nominal(m, it, k, groups, static_cast<std::uint64_t>(list_size));
        auto save = c_save_percent(it, n, m, k, groups, static_cast<std::uint64_t>(list_size));
        std::printf("%d/%d/%d      %14llu %14llu %8.1f %14.1f %15.1f\n", it.iglb, it.ible, it.iglo,
                    static_cast<unsigned long long>(cm), static_cast<unsigned long long>(cj),
                    c_rc_percent(cm, cj), save.exact_percent, save.approx_percent);
    }
    return 0;
}

int cmd_scenario_validate(const std::string& config_path) {
    SimConfig cfg = load_config(config_path, nullptr);
    SimContext ctx = SimContext::build(cfg);
    std::printf("scenario ok: N=%d satellites, M=%d LNBs, D=%.3g m, lambda=%.4g m\n",
                cfg.scenario.satellite_count(), cfg.scenario.lnb_count,
                cfg.scenario.dish_diameter_m, cfg.scenario.wavelength_m);
    std::printf("3-dB beamwidth (boresight LNB): %.2f deg\n",
                three_db_beamwidth_deg(ctx.pattern, 0));
    std::printf("K_nn:\n");
    for (int i = 0; i < cfg.scenario.lnb_count; ++i) {
        for (int j = 0; j < cfg.scenario.lnb_count; ++j)
            std::printf(" %8.4f%+.4fi", ctx.knn(i, j).real(), ctx.knn(i, j).imag());
        std::printf("\n");
    }
    return 0;
}

int cmd_pattern_export(const std::string& config_path, const std::string& out_path) {
    SimConfig cfg = load_config(config_path, nullptr);
    AntennaPattern p = (cfg.scenario.pattern_source == PatternSource::File)
                           ? load_pattern_file(cfg.scenario.pattern_file)
                           : analytic_pattern(cfg.scenario);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("pattern export: cannot write " + out_path);
    export_pattern_csv(p, out);
    std::printf("wrote %s (%d LNBs, %zu angles)\n", out_path.c_str(), p.lnb_count(),
                p.grid_rad.size());
    return 0;
}

int cmd_selftest();

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_flag, int workers_flag) {
    std::string raw;
    SimConfig cfg = load_config(config_path, &raw);
    if (seed_flag) cfg.seed = *seed_flag;
    if (!cfg.seed) throw ConfigError("seed: required (pass --seed or set it in the config file)");
    if (workers_flag > 0) cfg.workers = workers_flag;

    auto t0 = std::chrono::steady_clock::now();
    SimContext ctx = SimContext::build(cfg);
    auto points = run_ber_sweep(ctx);
    auto t1 = std::chrono::steady_clock::now();

    RunManifest manifest;
    manifest.tool_version = kToolVersion;
    char digest[32];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(raw)));
    manifest.config_digest = digest;
    manifest.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    manifest.resolved_config = config_to_json(cfg);
    emit_results(points, manifest, out_dir);

    for (const auto& p : points)
        std::printf("%-20s %6.1f dB  ber=%.4g  (%llu errors / %llu bits, %d frames)\n",
                    p.detector.c_str(), p.snr_db, p.ber,
                    static_cast<unsigned long long>(p.bit_errors),
                    static_cast<unsigned long long>(p.bits_counted), p.frames_used);
    std::printf("results written to %s\n", out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"satrx: overloaded satellite broadcast receiver simulator"};
    app.require_subcommand(1);

    auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo BER study");
    std::string sweep_config, sweep_out = "satrx_out";
    std::uint64_t sweep_seed = 0;
    int sweep_workers = 0;
    sweep->add_option("--config", sweep_config, "scenario JSON file (defaults: paper scenario)");
    sweep->add_option("--out", sweep_out, "output directory");
    auto* seed_opt = sweep->add_option("--seed", sweep_seed,
                                       "RNG seed (required unless set in the config)");
    sweep->add_option("--workers", sweep_workers, "worker threads");

    auto* complexity = app.add_subcommand("complexity", "print the closed-form complexity table");
    std::string cx_mod = "8psk";
    int cx_list = 8;
    complexity->add_option("--modulation", cx_mod, "8psk or 16apsk");
    complexity->add_option("--list-size", cx_list, "list size L");

    auto* scenario = app.add_subcommand("scenario", "scenario utilities");
    scenario->require_subcommand(1);
    auto* validate = scenario->add_subcommand("validate", "validate a scenario config");
    std::string val_config;
    validate->add_option("--config", val_config, "scenario JSON file");

    auto* pattern = app.add_subcommand("pattern", "antenna pattern utilities");
    pattern->require_subcommand(1);
    auto* pexport = pattern->add_subcommand("export", "export the pattern as CSV");
    std::string pe_config, pe_out = "pattern.csv";
    pexport->add_option("--config", pe_config, "scenario JSON file");
    pexport->add_option("--out", pe_out, "output CSV path");

    auto* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*sweep)
            return cmd_sweep(sweep_config, sweep_out,
                             seed_opt->count() ? std::optional<std::uint64_t>(sweep_seed)
                                               : std::nullopt,
                             sweep_workers);
        if (*complexity) return cmd_complexity(cx_mod, cx_list);
        if (*validate) return cmd_scenario_validate(val_config);
        if (*pexport) return cmd_pattern_export(pe_config, pe_out);
        if (*selftest) return cmd_selftest();
    } catch (const satrx::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}

namespace {

int cmd_selftest() {
    using namespace satrx;
    std::mt19937_64 rng(20240901);
    NormalSampler normal;
    int failures = 0;

    auto random_matrix = [&](int rows, int cols) {
        Eigen::MatrixXcd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = cxd{normal(rng), normal(rng)};
        return m;
    };

    // Exhaustive-configuration RC-LGSD must agree with JML.
    {
        int bad = 0;
        for (int trial = 0; trial < 50; ++trial) {
            int n = 2 + static_cast<int>(bounded(rng, 2));
            auto c = build_constellation(trial % 2 ? ConstellationKind::QPSK
                                                   : ConstellationKind::BPSK);
            // Square model: the single group spans all streams.
            Eigen::MatrixXcd h = random_matrix(n, n);
            Eigen::VectorXcd y = random_matrix(n, 1);
            LgsdConfig cfg;
            cfg.group_sizes = {n};
            cfg.list_size = 1;
            for (int j = 0; j < n; ++j) cfg.list_size *= c.size();
            cfg.iterations = {1, 1, 1};
            cfg.rng_seed = rng();
            auto lgsd = rc_lgsd_detect(h, y, c, cfg);
            auto [jml, jml_mse] = jml_detect(h, y, c);
            if (lgsd.s_hat != jml) ++bad;
        }
        std::printf("selftest: exhaustive RC-LGSD vs JML: %s\n", bad ? "FAIL" : "ok");
        failures += bad;
    }

    // Whitening identity on random scenarios.
    {
        int bad = 0;
        for (int trial = 0; trial < 20; ++trial) {
            int m = 1 + static_cast<int>(bounded(rng, 3));
            int n = m + 1 + static_cast<int>(bounded(rng, 3));
            Eigen::MatrixXcd a = random_matrix(m, n);
            Eigen::MatrixXcd q = random_matrix(m, m);
            Eigen::MatrixXcd knn = q * q.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(m, m);
            Eigen::VectorXd d = knn.diagonal().real().cwiseSqrt();
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) knn(i, j) /= d(i) * d(j);
            auto st = build_preprocessor(a, knn, 0.5, BeamformerMode::Sinr);
            Eigen::MatrixXcd g = st.w.adjoint() * knn * st.w;
            double err = (st.t.adjoint() * g * st.t -
                          Eigen::MatrixXcd::Identity(m, m))
                             .norm();
            if (err > 1e-9) ++bad;
        }
        std::printf("selftest: whitening identity: %s\n", bad ? "FAIL" : "ok");
        failures += bad;
    }

    // Ledger/formula agreement.
    {
        int bad = 0;
        for (int trial = 0; trial < 20; ++trial) {
            int m = 2 + static_cast<int>(bounded(rng, 2));
            int n = m + 1 + static_cast<int>(bounded(rng, 2));
            auto c = build_constellation(ConstellationKind::QPSK);
            Eigen::MatrixXcd h = random_matrix(m, n);
            Eigen::VectorXcd y = random_matrix(m, 1);
            LgsdConfig cfg;
            cfg.group_sizes = {2};
            for (int rest = n - 2; rest > 0; --rest) cfg.group_sizes.push_back(1);
            cfg.iterations = {2, 2, 2};
            cfg.rng_seed = rng();
            auto out = rc_lgsd_detect(h, y, c, cfg);
            auto rep = reconcile(out.ledger, m, cfg.iterations, static_cast<int>(c.size()),
                                 cfg.group_sizes);
            if (!rep.exact()) ++bad;
        }
        std::printf("selftest: ledger reconciliation: %s\n", bad ? "FAIL" : "ok");
        failures += bad;
    }

    if (failures) {
        std::printf("selftest: FAILED\n");
        return 3;
    }
    std::printf("selftest: all checks passed\n");
    return 0;
}

}  // namespace
