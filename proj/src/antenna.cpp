// SPDX-License-Identifier: Apache-2.0

#include "satrx/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace satrx {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFloorDb = -40.0;

double deg2rad(double d) { return d * kPi / 180.0; }

// Half-power point of 2*J1(u)/u, solved once by bisection.
double aperture_half_power_u() {
    static const double u_half = [] {
        double lo = 1.0, hi = 2.5;
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            double g = aperture_gain(mid);
            if (g * g > 0.5)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }();
    return u_half;
}

// Largest |u| at which the pattern still reaches the floor amplitude.
double aperture_support_u(double floor_amp) {
    double last = 0.0;
    for (double u = 0.0; u < 60.0; u += 1e-3) {
        if (std::abs(aperture_gain(u)) >= floor_amp) last = u;
    }
    return last;
}

std::vector<double> make_grid(int intervals) {
    if (intervals < 8 || intervals % 2 != 0)
        throw std::invalid_argument("pattern grid intervals must be even and >= 8");
    std::vector<double> g(intervals + 1);
    for (int i = 0; i <= intervals; ++i)
        g[i] = -kPi + 2.0 * kPi * static_cast<double>(i) / intervals;
    return g;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r' && ch != ' ' && ch != '\t') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

double aperture_gain(double u) {
    double au = std::abs(u);
    if (au < 1e-4) {
        // Series for 2*J1(u)/u around 0.
        double u2 = u * u;
        return 1.0 - u2 / 8.0 + u2 * u2 / 192.0;
    }
    return 2.0 * std::cyl_bessel_j(1, au) / au;
}

void Scenario::validate() const {
    const int n = satellite_count();
    if (n < 1) throw std::invalid_argument("theta_deg: at least one satellite required");
    if (lnb_count < 1) throw std::invalid_argument("m: at least one LNB required");
    if (n < lnb_count)
        throw std::invalid_argument("theta_deg: satellite count below LNB count");
    if (theta_deg[0] != 0.0)
        throw std::invalid_argument("theta_deg: first angle must be 0 (desired satellite)");
    for (int i = 0; i < n; ++i) {
        if (std::abs(theta_deg[i]) > 180.0)
            throw std::invalid_argument("theta_deg: angle outside [-180, 180]");
        for (int j = i + 1; j < n; ++j)
            if (theta_deg[i] == theta_deg[j])
                throw std::invalid_argument("theta_deg: duplicate orbital angles");
    }
    if (!(dish_diameter_m > 0.0))
        throw std::invalid_argument("dish_diameter_m: must be positive");
    if (!(wavelength_m > 0.0))
        throw std::invalid_argument("wavelength_m: must be positive");
    if (static_cast<int>(lnb_offsets_deg.size()) != lnb_count)
        throw std::invalid_argument("lnb_offsets_deg: size must equal m");
    if (pattern_source == PatternSource::File && pattern_file.empty())
        throw std::invalid_argument("pattern_file: required for file pattern source");
}

Scenario Scenario::paper_default() {
    Scenario s;
    s.theta_deg = {0.0, 3.0, -2.8, 5.7, -5.9};
    s.lnb_count = 3;
    s.dish_diameter_m = 0.35;
    s.wavelength_m = 0.025;
    s.lnb_offsets_deg = {0.0, 2.9, -2.9};
    return s;
}

cxd AntennaPattern::value(int lnb, double theta_rad) const {
    if (theta_rad < grid_rad.front() - 1e-12 || theta_rad > grid_rad.back() + 1e-12)
        throw std::out_of_range("angle outside pattern grid");
    if (aperture) {
        double u = aperture->u_scale * std::sin(theta_rad - aperture->offsets_rad[lnb]);
        double g = aperture_gain(u);
        if (std::abs(u) > aperture->u_support)
            return cxd{std::copysign(aperture->floor_amp, g), 0.0};
        return cxd{g, 0.0};
    }
    double pos = (theta_rad - grid_rad.front()) / grid_step();
    auto i = static_cast<std::ptrdiff_t>(pos);
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(grid_rad.size()) - 2);
    double t = pos - static_cast<double>(i);
    return (1.0 - t) * gains(lnb, i) + t * gains(lnb, i + 1);
}

AntennaPattern AntennaPattern::coarsened() const {
    AntennaPattern out;
    out.aperture = aperture;
    const auto n = static_cast<Eigen::Index>(grid_rad.size());
    out.grid_rad.reserve((grid_rad.size() + 1) / 2);
    out.gains.resize(gains.rows(), (n + 1) / 2);
    for (Eigen::Index i = 0; i < n; i += 2) {
        out.grid_rad.push_back(grid_rad[static_cast<std::size_t>(i)]);
        out.gains.col(i / 2) = gains.col(i);
    }
    return out;
}

AntennaPattern analytic_pattern(const Scenario& s, int grid_intervals) {
    s.validate();
    if (s.pattern_source != PatternSource::Analytic)
        throw std::invalid_argument("analytic_pattern requires an Analytic pattern source");

    const double bw_deg = 70.0 * s.wavelength_m / s.dish_diameter_m;
    if (bw_deg >= 120.0)
        throw std::invalid_argument("dish too small: estimated beamwidth exceeds 120 deg");

    AntennaPattern p;
    AntennaPattern::ApertureParams ap;
    // Calibrate the angle-to-u mapping so the half-power half-angle lands on
    // the 70*lambda/D estimate (uniform illumination alone gives ~59*lambda/D).
    const double half_angle = deg2rad(bw_deg / 2.0);
    ap.u_scale = aperture_half_power_u() / std::sin(half_angle);
    ap.floor_amp = std::pow(10.0, kFloorDb / 20.0);
    ap.u_support = aperture_support_u(ap.floor_amp);
    ap.offsets_rad.resize(s.lnb_count);
    for (int m = 0; m < s.lnb_count; ++m) ap.offsets_rad[m] = deg2rad(s.lnb_offsets_deg[m]);

    p.grid_rad = make_grid(grid_intervals);
    p.aperture = ap;
    p.gains.resize(s.lnb_count, static_cast<Eigen::Index>(p.grid_rad.size()));
    for (int m = 0; m < s.lnb_count; ++m)
        for (std::size_t i = 0; i < p.grid_rad.size(); ++i)
            p.gains(m, static_cast<Eigen::Index>(i)) = p.value(m, p.grid_rad[i]);
    return p;
}

AntennaPattern parse_pattern_csv(std::istream& in, int grid_intervals) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("pattern csv: empty file");
    auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"lnb_index", "angle_deg", "gain_db", "phase_deg"};
    for (const auto& col : expected) {
        if (std::find(header.begin(), header.end(), col) == header.end())
            throw std::invalid_argument("pattern csv: missing " + col + " column");
    }
    if (header != expected)
        throw std::invalid_argument("pattern csv: columns must be lnb_index,angle_deg,gain_db,phase_deg");

    struct Row {
        int lnb;
        double angle, gain_db, phase_deg;
    };
    std::vector<Row> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() != 4)
            throw std::invalid_argument("pattern csv: bad field count at line " + std::to_string(line_no));
        try {
            rows.push_back({std::stoi(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3])});
        } catch (const std::exception&) {
            throw std::invalid_argument("pattern csv: unparsable number at line " + std::to_string(line_no));
        }
    }
    if (rows.empty()) throw std::invalid_argument("pattern csv: no data rows");

    int m_count = 0;
    for (const auto& r : rows) m_count = std::max(m_count, r.lnb + 1);
    std::vector<std::vector<Row>> per_lnb(m_count);
    int prev_lnb = -1;
    for (const auto& r : rows) {
        if (r.lnb < 0) throw std::invalid_argument("pattern csv: negative lnb_index");
        if (r.lnb < prev_lnb)
            throw std::invalid_argument("pattern csv: rows not sorted by lnb_index");
        if (!per_lnb[r.lnb].empty() && r.angle <= per_lnb[r.lnb].back().angle)
            throw std::invalid_argument("pattern csv: angle grid not strictly increasing for lnb " +
                                        std::to_string(r.lnb));
        prev_lnb = r.lnb;
        per_lnb[r.lnb].push_back(r);
    }
    for (int m = 0; m < m_count; ++m) {
        if (per_lnb[m].size() < 2)
            throw std::invalid_argument("pattern csv: lnb " + std::to_string(m) + " needs at least 2 rows");
    }

    // Sampling density check: at least 2 rows inside each LNB's 3-dB region.
    for (int m = 0; m < m_count; ++m) {
        double peak = per_lnb[m][0].gain_db;
        for (const auto& r : per_lnb[m]) peak = std::max(peak, r.gain_db);
        std::size_t in_region = 0;
        for (const auto& r : per_lnb[m])
            if (r.gain_db >= peak - 3.0) ++in_region;
        if (in_region < 2)
            throw std::invalid_argument("pattern csv: fewer than 2 rows per 3-dB beamwidth for lnb " +
                                        std::to_string(m));
    }

    // Unwrap phases, then resample (gain_db, phase) linearly onto the grid.
    for (auto& v : per_lnb) {
        for (std::size_t i = 1; i < v.size(); ++i) {
            while (v[i].phase_deg - v[i - 1].phase_deg > 180.0) v[i].phase_deg -= 360.0;
            while (v[i].phase_deg - v[i - 1].phase_deg < -180.0) v[i].phase_deg += 360.0;
        }
    }

    double peak_db = per_lnb[0][0].gain_db;
    for (const auto& v : per_lnb)
        for (const auto& r : v) peak_db = std::max(peak_db, r.gain_db);

    AntennaPattern p;
    p.grid_rad = make_grid(grid_intervals);
    p.gains.resize(m_count, static_cast<Eigen::Index>(p.grid_rad.size()));
    for (int m = 0; m < m_count; ++m) {
        const auto& v = per_lnb[m];
        std::size_t j = 0;
        for (std::size_t i = 0; i < p.grid_rad.size(); ++i) {
            double ang = p.grid_rad[i] * 180.0 / kPi;
            double db, ph;
            if (ang <= v.front().angle) {
                db = (ang < v.front().angle) ? peak_db + kFloorDb : v.front().gain_db;
                ph = v.front().phase_deg;
            } else if (ang >= v.back().angle) {
                db = (ang > v.back().angle) ? peak_db + kFloorDb : v.back().gain_db;
                ph = v.back().phase_deg;
            } else {
                while (j + 2 < v.size() && v[j + 1].angle < ang) ++j;
                double t = (ang - v[j].angle) / (v[j + 1].angle - v[j].angle);
                db = (1.0 - t) * v[j].gain_db + t * v[j + 1].gain_db;
                ph = (1.0 - t) * v[j].phase_deg + t * v[j + 1].phase_deg;
            }
            double amp = std::pow(10.0, db / 20.0);
            p.gains(m, static_cast<Eigen::Index>(i)) = std::polar(amp, deg2rad(ph));
        }
    }

    double peak_amp = p.gains.cwiseAbs().maxCoeff();
    if (!(peak_amp > 0.0)) throw std::invalid_argument("pattern csv: all-zero pattern");
    p.gains /= peak_amp;
    return p;
}

AntennaPattern load_pattern_file(const std::string& path, int grid_intervals) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("pattern csv: cannot open " + path);
    return parse_pattern_csv(in, grid_intervals);
}

void export_pattern_csv(const AntennaPattern& p, std::ostream& out) {
    out << "lnb_index,angle_deg,gain_db,phase_deg\n";
    char buf[128];
    for (int m = 0; m < p.lnb_count(); ++m) {
        for (std::size_t i = 0; i < p.grid_rad.size(); ++i) {
            cxd g = p.gains(m, static_cast<Eigen::Index>(i));
            double amp = std::abs(g);
            double db = amp > 0.0 ? 20.0 * std::log10(amp) : -400.0;
            double ph = amp > 0.0 ? std::arg(g) * 180.0 / kPi : 0.0;
            std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g\n", m,
                          p.grid_rad[i] * 180.0 / kPi, db, ph);
            out << buf;
        }
    }
}

Eigen::MatrixXcd channel_matrix(const AntennaPattern& p, const std::vector<double>& theta_deg) {
    Eigen::MatrixXcd a(p.lnb_count(), static_cast<Eigen::Index>(theta_deg.size()));
    for (int m = 0; m < p.lnb_count(); ++m)
        for (std::size_t j = 0; j < theta_deg.size(); ++j)
            a(m, static_cast<Eigen::Index>(j)) = p.value(m, deg2rad(theta_deg[j]));
    if (!a.allFinite()) throw std::runtime_error("channel matrix has non-finite entries");
    return a;
}

Eigen::MatrixXcd channel_matrix(const AntennaPattern& p, const Scenario& s) {
    return channel_matrix(p, s.theta_deg);
}

Eigen::MatrixXcd noise_correlation(const AntennaPattern& p) {
    const auto n = static_cast<Eigen::Index>(p.grid_rad.size());
    const double step = p.grid_step();
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, step);
    w(0) *= 0.5;
    w(n - 1) *= 0.5;

    // Weighted Gram matrix: Hermitian and PSD by construction.
    Eigen::MatrixXcd scaled = p.gains * w.cwiseSqrt().asDiagonal();
    Eigen::MatrixXcd e = scaled * scaled.adjoint();

    const int m = p.lnb_count();
    Eigen::MatrixXcd k(m, m);
    for (int i = 0; i < m; ++i) {
        if (!(e(i, i).real() > 0.0))
            throw std::runtime_error("noise_correlation: zero-energy pattern for lnb " + std::to_string(i));
    }
    for (int i = 0; i < m; ++i) {
        k(i, i) = 1.0;
        for (int j = i + 1; j < m; ++j) {
            cxd v = e(i, j) / std::sqrt(e(i, i).real() * e(j, j).real());
            k(i, j) = v;
            k(j, i) = std::conj(v);
        }
    }
    return k;
}

Eigen::MatrixXcd paper_fixture_knn() {
    Eigen::MatrixXcd k(3, 3);
    k << 1.0, 0.31, 0.01,
         0.31, 1.0, 0.31,
         0.01, 0.31, 1.0;
    return k;
}

double three_db_beamwidth_deg(const AntennaPattern& p, int lnb) {
    const auto n = static_cast<Eigen::Index>(p.grid_rad.size());
    Eigen::Index peak_i = 0;
    double peak = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double a = std::abs(p.gains(lnb, i));
        if (a > peak) {
            peak = a;
            peak_i = i;
        }
    }
    const double thresh = peak / std::sqrt(2.0);
    auto cross = [&](Eigen::Index from, int dir) {
        Eigen::Index i = from;
        while (i + dir >= 0 && i + dir < n && std::abs(p.gains(lnb, i + dir)) >= thresh) i += dir;
        Eigen::Index j = i + dir;
        if (j < 0 || j >= n) return p.grid_rad[static_cast<std::size_t>(i)];
        // Interpolate the crossing between samples i and j.
        double ai = std::abs(p.gains(lnb, i)), aj = std::abs(p.gains(lnb, j));
        double t = (ai - thresh) / (ai - aj);
        return p.grid_rad[static_cast<std::size_t>(i)] +
               t * (p.grid_rad[static_cast<std::size_t>(j)] - p.grid_rad[static_cast<std::size_t>(i)]);
    };
    double lo = cross(peak_i, -1);
    double hi = cross(peak_i, +1);
    return (hi - lo) * 180.0 / kPi;
}

}  // namespace satrx
