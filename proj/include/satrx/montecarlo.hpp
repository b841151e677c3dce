// SPDX-License-Identifier: Apache-2.0
//
// Link-level Monte-Carlo harness: frame generation, correlated noise
// synthesis, pointing-error injection, SNR calibration, and BER estimation
// for the desired satellite. Per-frame RNG streams are derived from
// (seed, snr index, frame index), so results are independent of execution
// order and worker count.

#ifndef SATRX_MONTECARLO_HPP
#define SATRX_MONTECARLO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "satrx/antenna.hpp"
#include "satrx/complexity.hpp"
#include "satrx/constellation.hpp"
#include "satrx/detectors.hpp"
#include "satrx/preprocessor.hpp"

namespace satrx {

struct DetectorSpec {
    enum class Type { Jml, RcLgsd, Lgsd, Echo };  // Echo: test stub, returns the truth

    std::string name;
    Type type = Type::RcLgsd;
    BeamformerMode beamformer = BeamformerMode::Sinr;
    IterationSet iterations;
    std::size_t list_size = 8;
    std::vector<int> group_sizes = {3, 2};
    bool reshuffle = true;

    // Lgsd uses the untruncated N-row model with one BLE per row.
    bool uses_full_model() const { return type == Type::Lgsd; }
};

struct SimConfig {
    Scenario scenario = Scenario::paper_default();
    ConstellationKind modulation = ConstellationKind::PSK8;
    double radius_ratio = 2.85;
    std::vector<double> snr_db;
    std::vector<DetectorSpec> detectors;
    int frames_per_point = 200;
    int min_bit_errors = 200;
    std::optional<std::uint64_t> seed;
    double pointing_error_deg = 0.0;
    int symbols_per_frame = 1000;
    int workers = 1;

    static SimConfig paper_default();
    void validate() const;
};

struct BerPoint {
    std::string detector;
    double snr_db = 0.0;
    std::uint64_t bit_errors = 0;
    std::uint64_t bits_counted = 0;
    double ber = 0.0;
    int frames_used = 0;
};

// sigma2 = ||A||_F^2 / (10^(snr/10) * M * N).
double sigma2_from_snr(const Eigen::MatrixXcd& a, double snr_db);
double snr_from_sigma2(const Eigen::MatrixXcd& a, double sigma2);

// C with C C^H = K_nn, from the eigendecomposition with eigenvalues floored
// at zero.
Eigen::MatrixXcd correlation_factor(const Eigen::MatrixXcd& knn);

// count circularly-symmetric Gaussian vectors with covariance sigma2*K_nn.
std::vector<Eigen::VectorXcd> draw_correlated_noise(const Eigen::MatrixXcd& knn, double sigma2,
                                                    std::mt19937_64& rng, int count);

// N i.i.d. draws from Normal(0, (theta_e/3)^2), degrees.
std::vector<double> draw_pointing_error(double theta_e_deg, int n, std::mt19937_64& rng);

// Precomputed per-simulation state shared across detectors and SNR points.
struct SimContext {
    SimConfig config;
    Constellation constellation;
    AntennaPattern pattern;
    Eigen::MatrixXcd a_nominal;
    Eigen::MatrixXcd knn;
    Eigen::MatrixXcd noise_factor;  // correlation_factor(knn)

    static SimContext build(const SimConfig& cfg);
};

struct FrameResult {
    std::uint64_t bit_errors = 0;
    std::uint64_t bits = 0;
    ComplexityLedger ledger;
};

// One frame: the transmit side applies the (possibly pointing-perturbed)
// channel, the receiver preprocesses with the nominal channel and runs the
// detector; bit errors are counted on the desired stream only.
FrameResult run_frame(const SimContext& ctx, const DetectorSpec& det,
                      const PreprocessorState& state, double sigma2, std::uint64_t frame_seed,
                      bool keep_ledger_detail = false);

std::vector<BerPoint> run_ber_sweep(const SimConfig& cfg);
std::vector<BerPoint> run_ber_sweep(const SimContext& ctx);

}  // namespace satrx

#endif
