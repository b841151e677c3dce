// SPDX-License-Identifier: Apache-2.0

#include "satrx/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "satrx/rng.hpp"

namespace satrx {

SimConfig SimConfig::paper_default() {
    SimConfig cfg;
    cfg.snr_db = {0, 4, 8, 12, 16, 20, 24, 28};

    DetectorSpec jml;
    jml.name = "jml";
    jml.type = DetectorSpec::Type::Jml;
    jml.beamformer = BeamformerMode::Sinr;

    DetectorSpec rc;
    rc.name = "rc-lgsd-2-1-2";
    rc.type = DetectorSpec::Type::RcLgsd;
    rc.beamformer = BeamformerMode::Sinr;
    rc.iterations = {2, 1, 2};

    DetectorSpec lgsd;
    lgsd.name = "lgsd-mrc-2-1-2";
    lgsd.type = DetectorSpec::Type::Lgsd;
    lgsd.beamformer = BeamformerMode::Mrc;
    lgsd.iterations = {2, 1, 2};

    cfg.detectors = {jml, rc, lgsd};
    return cfg;
}

void SimConfig::validate() const {
    scenario.validate();
    if (snr_db.empty()) throw std::invalid_argument("snr_db: must be nonempty");
    if (detectors.empty()) throw std::invalid_argument("detectors: must be nonempty");
    if (frames_per_point < 1) throw std::invalid_argument("frames_per_point: must be >= 1");
    if (min_bit_errors < 1) throw std::invalid_argument("min_bit_errors: must be >= 1");
    if (symbols_per_frame < 1) throw std::invalid_argument("symbols_per_frame: must be >= 1");
    if (workers < 1) throw std::invalid_argument("workers: must be >= 1");
    if (pointing_error_deg < 0.0) throw std::invalid_argument("pointing_error_deg: must be >= 0");
    const int n = scenario.satellite_count();
    const int m = scenario.lnb_count;
    for (const auto& d : detectors) {
        if (d.name.empty()) throw std::invalid_argument("detectors: name must be nonempty");
        if (d.type == DetectorSpec::Type::Jml || d.type == DetectorSpec::Type::Echo) continue;
        int total = 0;
        for (int g : d.group_sizes) total += g;
        if (total != n)
            throw std::invalid_argument("detectors." + d.name + ": group sizes must sum to N");
        int rows = d.uses_full_model() ? n : std::min(m, n);
        for (int g : d.group_sizes)
            if (g > rows)
                throw std::invalid_argument("detectors." + d.name +
                                            ": group size exceeds detector row count");
    }
}

double sigma2_from_snr(const Eigen::MatrixXcd& a, double snr_db) {
    double fro2 = a.squaredNorm();
    if (!(fro2 > 0.0)) throw std::invalid_argument("sigma2_from_snr: zero channel matrix");
    double snr = std::pow(10.0, snr_db / 10.0);
    return fro2 / (snr * static_cast<double>(a.rows()) * static_cast<double>(a.cols()));
}

double snr_from_sigma2(const Eigen::MatrixXcd& a, double sigma2) {
    double fro2 = a.squaredNorm();
    return 10.0 * std::log10(fro2 / (sigma2 * static_cast<double>(a.rows()) *
                                     static_cast<double>(a.cols())));
}

Eigen::MatrixXcd correlation_factor(const Eigen::MatrixXcd& knn) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(knn);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("correlation_factor: eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
}

std::vector<Eigen::VectorXcd> draw_correlated_noise(const Eigen::MatrixXcd& knn, double sigma2,
                                                    std::mt19937_64& rng, int count) {
    Eigen::MatrixXcd factor = std::sqrt(sigma2) * correlation_factor(knn);
    const auto m = knn.rows();
    std::vector<Eigen::VectorXcd> out;
    out.reserve(static_cast<std::size_t>(count));
    Eigen::VectorXcd w(m);
    for (int i = 0; i < count; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            auto [re, im] = NormalSampler::normal_pair(rng);
            w(j) = cxd{re, im} * M_SQRT1_2;  // component variance 1/2 per part
        }
        out.push_back(factor * w);
    }
    return out;
}

std::vector<double> draw_pointing_error(double theta_e_deg, int n, std::mt19937_64& rng) {
    if (theta_e_deg < 0.0) throw std::invalid_argument("pointing error must be >= 0");
    const double sigma = theta_e_deg / 3.0;
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; i += 2) {
        auto [a, b] = NormalSampler::normal_pair(rng);
        out[static_cast<std::size_t>(i)] = sigma * a;
        if (i + 1 < n) out[static_cast<std::size_t>(i) + 1] = sigma * b;
    }
    return out;
}

SimContext SimContext::build(const SimConfig& cfg) {
    cfg.validate();
    SimContext ctx;
    ctx.config = cfg;
    ctx.constellation = build_constellation(cfg.modulation, cfg.radius_ratio);
    ctx.pattern = (cfg.scenario.pattern_source == PatternSource::File)
                      ? load_pattern_file(cfg.scenario.pattern_file)
                      : analytic_pattern(cfg.scenario);
    ctx.a_nominal = channel_matrix(ctx.pattern, cfg.scenario);
    ctx.knn = noise_correlation(ctx.pattern);
    ctx.noise_factor = correlation_factor(ctx.knn);
    return ctx;
}

namespace {

LgsdConfig lgsd_config_for(const DetectorSpec& det, std::uint64_t slot_seed) {
    LgsdConfig cfg;
    cfg.list_size = det.list_size;
    cfg.iterations = det.iterations;
    cfg.group_sizes = det.group_sizes;
    cfg.reshuffle = det.reshuffle;
    cfg.rng_seed = slot_seed;
    cfg.ble_count = det.uses_full_model() ? BleCount::FullN : BleCount::TruncatedM;
    return cfg;
}

}  // namespace

FrameResult run_frame(const SimContext& ctx, const DetectorSpec& det,
                      const PreprocessorState& state, double sigma2, std::uint64_t frame_seed,
                      bool keep_ledger_detail) {
    const auto& cfg = ctx.config;
    const auto& c = ctx.constellation;
    const int n = cfg.scenario.satellite_count();
    const int m = cfg.scenario.lnb_count;
    const int slots = cfg.symbols_per_frame;
    const std::size_t k = c.size();

    std::mt19937_64 rng(frame_seed);

    // Draw order is pinned so every detector sees the same channel
    // realization: pointing errors, then all symbols, then all noise, then
    // per-slot detector seeds.
    std::vector<double> theta_err = draw_pointing_error(cfg.pointing_error_deg, n, rng);

    Eigen::MatrixXcd a_tx = ctx.a_nominal;
    if (cfg.pointing_error_deg > 0.0) {
        std::vector<double> perturbed = cfg.scenario.theta_deg;
        for (int j = 0; j < n; ++j) perturbed[static_cast<std::size_t>(j)] += theta_err[static_cast<std::size_t>(j)];
        a_tx = channel_matrix(ctx.pattern, perturbed);
    }

    std::vector<std::uint8_t> tx(static_cast<std::size_t>(slots) * static_cast<std::size_t>(n));
    for (auto& idx : tx) idx = static_cast<std::uint8_t>(bounded(rng, k));

    Eigen::MatrixXcd noise(m, slots);
    const Eigen::MatrixXcd noise_scale = std::sqrt(sigma2) * ctx.noise_factor;
    Eigen::VectorXcd w(m);
    for (int s = 0; s < slots; ++s) {
        for (int i = 0; i < m; ++i) {
            auto [re, im] = NormalSampler::normal_pair(rng);
            w(i) = cxd{re, im} * M_SQRT1_2;
        }
        noise.col(s) = noise_scale * w;
    }

    const Eigen::MatrixXcd& h = det.uses_full_model() ? state.h_full : state.h;

    FrameResult res;
    Eigen::VectorXcd sym(n), r(m);
    for (int s = 0; s < slots; ++s) {
        const std::uint8_t* idx = &tx[static_cast<std::size_t>(s) * static_cast<std::size_t>(n)];
        for (int j = 0; j < n; ++j) sym(j) = c.points[idx[j]];
        r = a_tx * sym + noise.col(s);
        Eigen::VectorXcd y = det.uses_full_model() ? state.apply_full(r) : state.apply(r);

        std::uint32_t detected_label;
        switch (det.type) {
            case DetectorSpec::Type::Jml: {
                auto [s_hat, mse] = jml_detect(h, y, c);
                detected_label = c.bit_labels[s_hat[0]];
                break;
            }
            case DetectorSpec::Type::RcLgsd:
            case DetectorSpec::Type::Lgsd: {
                auto det_cfg = lgsd_config_for(det, rng());
                auto out = rc_lgsd_detect(h, y, c, det_cfg);
                detected_label = c.bit_labels[out.s_hat[0]];
                if (keep_ledger_detail) {
                    res.ledger.add(out.ledger);
                } else {
                    res.ledger.ble_squarings += out.ledger.ble_squarings;
                    res.ledger.glo_squarings += out.ledger.glo_squarings;
                }
                break;
            }
            case DetectorSpec::Type::Echo:
                detected_label = c.bit_labels[idx[0]];
                break;
        }
        std::uint32_t truth_label = c.bit_labels[idx[0]];
        res.bit_errors += static_cast<std::uint64_t>(std::popcount(detected_label ^ truth_label));
        res.bits += static_cast<std::uint64_t>(c.bits_per_symbol());
    }
    return res;
}

std::vector<BerPoint> run_ber_sweep(const SimConfig& cfg) {
    return run_ber_sweep(SimContext::build(cfg));
}

std::vector<BerPoint> run_ber_sweep(const SimContext& ctx) {
    const auto& cfg = ctx.config;
    if (!cfg.seed)
        throw std::invalid_argument("seed: required for a BER sweep");

    std::vector<BerPoint> points;
    for (const auto& det : cfg.detectors) {
        for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
            const double snr = cfg.snr_db[si];
            const double sigma2 = sigma2_from_snr(ctx.a_nominal, snr);
            const PreprocessorState state =
                build_preprocessor(ctx.a_nominal, ctx.knn, sigma2, det.beamformer);

            const int max_frames = cfg.frames_per_point;
            std::vector<FrameResult> frames(static_cast<std::size_t>(max_frames));
            int computed = 0;
            int used = 0;
            bool stop = false;

            // Frames are evaluated in deterministic chunks; the stopping
            // frame is decided on the prefix in index order, so the result
            // does not depend on the worker count.
            while (!stop && computed < max_frames) {
                int chunk = std::min(cfg.workers, max_frames - computed);
                if (chunk == 1) {
                    frames[static_cast<std::size_t>(computed)] =
                        run_frame(ctx, det, state, sigma2,
                                  derive_seed(*cfg.seed, si, static_cast<std::uint64_t>(computed)));
                } else {
                    std::vector<std::thread> pool;
                    pool.reserve(static_cast<std::size_t>(chunk));
                    for (int t = 0; t < chunk; ++t) {
                        int fi = computed + t;
                        pool.emplace_back([&, fi] {
                            frames[static_cast<std::size_t>(fi)] =
                                run_frame(ctx, det, state, sigma2,
                                          derive_seed(*cfg.seed, si, static_cast<std::uint64_t>(fi)));
                        });
                    }
                    for (auto& th : pool) th.join();
                }
                computed += chunk;

                std::uint64_t cum = 0;
                for (int f = 0; f < computed; ++f) {
                    cum += frames[static_cast<std::size_t>(f)].bit_errors;
                    if (cum >= static_cast<std::uint64_t>(cfg.min_bit_errors)) {
                        used = f + 1;
                        stop = true;
                        break;
                    }
                }
                if (!stop) used = computed;
            }

            BerPoint p;
            p.detector = det.name;
            p.snr_db = snr;
            p.frames_used = used;
            for (int f = 0; f < used; ++f) {
                p.bit_errors += frames[static_cast<std::size_t>(f)].bit_errors;
                p.bits_counted += frames[static_cast<std::size_t>(f)].bits;
            }
            p.ber = p.bits_counted ? static_cast<double>(p.bit_errors) /
                                         static_cast<double>(p.bits_counted)
                                   : 0.0;
            points.push_back(std::move(p));
        }
    }
    return points;
}

}  // namespace satrx
