// SPDX-License-Identifier: Apache-2.0
//
// LNB radiation patterns, the MxN channel matrix from orbital angles, and
// the spatial noise-correlation matrix K_nn obtained from pattern overlap.

#ifndef SATRX_ANTENNA_HPP
#define SATRX_ANTENNA_HPP

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace satrx {

using cxd = std::complex<double>;

enum class PatternSource { Analytic, File };

struct Scenario {
    std::vector<double> theta_deg;        // orbital angles, theta[0] == 0 (desired)
    int lnb_count = 1;                    // M
    double dish_diameter_m = 0.35;
    double wavelength_m = 0.025;
    std::vector<double> lnb_offsets_deg;  // beam squint per LNB
    PatternSource pattern_source = PatternSource::Analytic;
    std::string pattern_file;

    int satellite_count() const { return static_cast<int>(theta_deg.size()); }
    // Throws std::invalid_argument naming the offending field. Allows N == M
    // (test scenarios); the CLI layer additionally enforces N > M.
    void validate() const;

    // N=5 satellites at [0, 3, -2.8, 5.7, -5.9] deg, M=3 LNBs on a 35-cm
    // Ku-band dish with side beams squinted to +-2.9 deg.
    static Scenario paper_default();
};

// Per-LNB complex gains sampled on a uniform grid over [-pi, pi]. Patterns
// synthesized from the aperture model additionally carry the closed-form
// parameters so they can be evaluated exactly off-grid.
struct AntennaPattern {
    std::vector<double> grid_rad;  // uniform, inclusive of both endpoints
    Eigen::MatrixXcd gains;        // M x grid size

    struct ApertureParams {
        double u_scale;                   // u = u_scale * sin(theta - offset)
        double u_support;                 // |u| beyond which the floor applies
        double floor_amp;                 // -40 dB relative to peak
        std::vector<double> offsets_rad;  // per-LNB squint
    };
    std::optional<ApertureParams> aperture;

    int lnb_count() const { return static_cast<int>(gains.rows()); }
    double grid_step() const { return grid_rad[1] - grid_rad[0]; }

    // p_m(theta): closed form for aperture patterns, linear interpolation on
    // the sampled grid otherwise. theta must lie in [-pi, pi].
    cxd value(int lnb, double theta_rad) const;

    // Pattern resampled on every other grid point (half resolution), for
    // quadrature convergence checks.
    AntennaPattern coarsened() const;
};

// Uniformly illuminated circular-aperture amplitude pattern 2*J1(u)/u.
double aperture_gain(double u);

inline constexpr int kDefaultGridIntervals = 1 << 14;

// Synthesizes aperture patterns for the scenario's dish and LNB squints.
// The angle-to-u mapping is calibrated so the boresight 3-dB beamwidth
// equals the 70*lambda/D degree estimate.
AntennaPattern analytic_pattern(const Scenario& s, int grid_intervals = kDefaultGridIntervals);

// CSV schema: header `lnb_index,angle_deg,gain_db,phase_deg`, rows sorted by
// (lnb_index, angle_deg) with strictly increasing angles per LNB.
AntennaPattern load_pattern_file(const std::string& path, int grid_intervals = kDefaultGridIntervals);
AntennaPattern parse_pattern_csv(std::istream& in, int grid_intervals = kDefaultGridIntervals);
void export_pattern_csv(const AntennaPattern& p, std::ostream& out);

// A[i][j] = p_i(theta_j). Throws if an angle falls outside the grid.
Eigen::MatrixXcd channel_matrix(const AntennaPattern& p, const std::vector<double>& theta_deg);
Eigen::MatrixXcd channel_matrix(const AntennaPattern& p, const Scenario& s);

// Normalized pattern-overlap correlation by trapezoidal quadrature.
// Hermitian PSD with unit diagonal by construction.
Eigen::MatrixXcd noise_correlation(const AntennaPattern& p);

// The fixed 3x3 correlation matrix used by the reference scenario.
Eigen::MatrixXcd paper_fixture_knn();

// Full width of the |p|^2 >= peak^2/2 region around the main lobe, degrees.
double three_db_beamwidth_deg(const AntennaPattern& p, int lnb);

}  // namespace satrx

#endif
