// SPDX-License-Identifier: Apache-2.0

#include "satrx/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace satrx {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ConfigError(path + "." + it.key() + ": unknown key");
    }
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
    return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path + ": expected a string");
    return j.get<std::string>();
}

std::vector<double> get_number_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(path + ": expected numeric entries");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<int> get_int_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array");
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw ConfigError(path + ": expected integer entries");
        out.push_back(v.get<int>());
    }
    return out;
}

Scenario parse_scenario(const json& j) {
    Scenario s = Scenario::paper_default();
    reject_unknown_keys(j, {"theta_deg", "m", "dish_diameter_m", "wavelength_m",
                            "lnb_offsets_deg", "pattern_file"},
                        "scenario");
    if (j.contains("theta_deg")) s.theta_deg = get_number_array(j["theta_deg"], "scenario.theta_deg");
    if (j.contains("m")) s.lnb_count = get_int(j["m"], "scenario.m");
    if (j.contains("dish_diameter_m"))
        s.dish_diameter_m = get_number(j["dish_diameter_m"], "scenario.dish_diameter_m");
    if (j.contains("wavelength_m"))
        s.wavelength_m = get_number(j["wavelength_m"], "scenario.wavelength_m");
    if (j.contains("lnb_offsets_deg"))
        s.lnb_offsets_deg = get_number_array(j["lnb_offsets_deg"], "scenario.lnb_offsets_deg");
    else if (j.contains("m"))
        throw ConfigError("scenario.lnb_offsets_deg: required when m is given");
    if (j.contains("pattern_file")) {
        s.pattern_file = get_string(j["pattern_file"], "scenario.pattern_file");
        s.pattern_source = PatternSource::File;
    }
    return s;
}

DetectorSpec parse_detector(const json& j, const std::string& path) {
    reject_unknown_keys(j, {"name", "type", "iglb", "ible", "iglo", "list_size", "groups",
                            "beamformer", "reshuffle"},
                        path);
    DetectorSpec d;
    if (!j.contains("name")) throw ConfigError(path + ".name: required");
    d.name = get_string(j["name"], path + ".name");
    if (!j.contains("type")) throw ConfigError(path + ".type: required");
    std::string type = get_string(j["type"], path + ".type");
    if (type == "jml")
        d.type = DetectorSpec::Type::Jml;
    else if (type == "rc_lgsd")
        d.type = DetectorSpec::Type::RcLgsd;
    else if (type == "lgsd")
        d.type = DetectorSpec::Type::Lgsd;
    else
        throw ConfigError(path + ".type: must be jml, rc_lgsd or lgsd");

    d.beamformer = (d.type == DetectorSpec::Type::Lgsd) ? BeamformerMode::Mrc : BeamformerMode::Sinr;
    if (j.contains("beamformer")) {
        std::string b = get_string(j["beamformer"], path + ".beamformer");
        if (b == "mrc")
            d.beamformer = BeamformerMode::Mrc;
        else if (b == "sinr")
            d.beamformer = BeamformerMode::Sinr;
        else
            throw ConfigError(path + ".beamformer: must be mrc or sinr");
    }
    if (j.contains("iglb")) d.iterations.iglb = get_int(j["iglb"], path + ".iglb");
    if (j.contains("ible")) d.iterations.ible = get_int(j["ible"], path + ".ible");
    if (j.contains("iglo")) d.iterations.iglo = get_int(j["iglo"], path + ".iglo");
    if (j.contains("list_size")) {
        int ls = get_int(j["list_size"], path + ".list_size");
        if (ls < 1) throw ConfigError(path + ".list_size: must be >= 1");
        d.list_size = static_cast<std::size_t>(ls);
    }
    if (j.contains("groups")) d.group_sizes = get_int_array(j["groups"], path + ".groups");
    if (j.contains("reshuffle")) {
        if (!j["reshuffle"].is_boolean()) throw ConfigError(path + ".reshuffle: expected a boolean");
        d.reshuffle = j["reshuffle"].get<bool>();
    }
    return d;
}

const char* detector_type_name(DetectorSpec::Type t) {
    switch (t) {
        case DetectorSpec::Type::Jml: return "jml";
        case DetectorSpec::Type::RcLgsd: return "rc_lgsd";
        case DetectorSpec::Type::Lgsd: return "lgsd";
        case DetectorSpec::Type::Echo: return "echo";
    }
    return "?";
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

SimConfig parse_config_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    reject_unknown_keys(j, {"scenario", "modulation", "snr_db", "detectors", "frames_per_point",
                            "min_bit_errors", "seed", "pointing_error_deg"},
                        "config");
    SimConfig cfg = SimConfig::paper_default();
    if (j.contains("scenario")) cfg.scenario = parse_scenario(j["scenario"]);
    if (j.contains("modulation")) {
        try {
            cfg.modulation = constellation_kind_from_name(get_string(j["modulation"], "modulation"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("modulation: ") + e.what());
        }
    }
    if (j.contains("snr_db")) cfg.snr_db = get_number_array(j["snr_db"], "snr_db");
    if (j.contains("detectors")) {
        if (!j["detectors"].is_array()) throw ConfigError("detectors: expected an array");
        cfg.detectors.clear();
        int i = 0;
        for (const auto& d : j["detectors"])
            cfg.detectors.push_back(parse_detector(d, "detectors[" + std::to_string(i++) + "]"));
    }
    if (j.contains("frames_per_point"))
        cfg.frames_per_point = get_int(j["frames_per_point"], "frames_per_point");
    if (j.contains("min_bit_errors"))
        cfg.min_bit_errors = get_int(j["min_bit_errors"], "min_bit_errors");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw ConfigError("seed: expected an integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("pointing_error_deg"))
        cfg.pointing_error_deg = get_number(j["pointing_error_deg"], "pointing_error_deg");

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.scenario.satellite_count() <= cfg.scenario.lnb_count)
        throw ConfigError("scenario: overloaded constraint N > M violated");
    return cfg;
}

SimConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_config_json(j);
}

json config_to_json(const SimConfig& cfg) {
    json j;
    json sc;
    sc["theta_deg"] = cfg.scenario.theta_deg;
    sc["m"] = cfg.scenario.lnb_count;
    sc["dish_diameter_m"] = cfg.scenario.dish_diameter_m;
    sc["wavelength_m"] = cfg.scenario.wavelength_m;
    sc["lnb_offsets_deg"] = cfg.scenario.lnb_offsets_deg;
    if (cfg.scenario.pattern_source == PatternSource::File)
        sc["pattern_file"] = cfg.scenario.pattern_file;
    j["scenario"] = sc;
    j["modulation"] = to_string(cfg.modulation);
    j["snr_db"] = cfg.snr_db;
    json dets = json::array();
    for (const auto& d : cfg.detectors) {
        json dj;
        dj["name"] = d.name;
        dj["type"] = detector_type_name(d.type);
        dj["iglb"] = d.iterations.iglb;
        dj["ible"] = d.iterations.ible;
        dj["iglo"] = d.iterations.iglo;
        dj["list_size"] = static_cast<int>(d.list_size);
        dj["groups"] = d.group_sizes;
        dj["beamformer"] = (d.beamformer == BeamformerMode::Mrc) ? "mrc" : "sinr";
        dets.push_back(dj);
    }
    j["detectors"] = dets;
    j["frames_per_point"] = cfg.frames_per_point;
    j["min_bit_errors"] = cfg.min_bit_errors;
    if (cfg.seed) j["seed"] = *cfg.seed;
    j["pointing_error_deg"] = cfg.pointing_error_deg;
    return j;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

void write_results_csv(const std::vector<BerPoint>& points, std::ostream& out) {
    out << "detector,snr_db,frames,bits,bit_errors,ber\n";
    for (const auto& p : points) {
        out << p.detector << ',' << fmt(p.snr_db) << ',' << p.frames_used << ',' << p.bits_counted
            << ',' << p.bit_errors << ',' << fmt(p.ber) << '\n';
    }
}

std::string render_ber_svg(const std::vector<BerPoint>& points, const std::string& title) {
    static constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                               "#9467bd", "#ff7f0e", "#8c564b"};
    constexpr double kW = 800, kH = 520;
    constexpr double kL = 70, kR = 620, kT = 40, kB = 470;
    constexpr double kFloor = 1e-8;

    std::vector<std::string> detectors;
    for (const auto& p : points)
        if (std::find(detectors.begin(), detectors.end(), p.detector) == detectors.end())
            detectors.push_back(p.detector);

    double xmin = points.front().snr_db, xmax = xmin;
    for (const auto& p : points) {
        xmin = std::min(xmin, p.snr_db);
        xmax = std::max(xmax, p.snr_db);
    }
    if (xmax == xmin) xmax = xmin + 1.0;

    auto xpos = [&](double snr) { return kL + (snr - xmin) / (xmax - xmin) * (kR - kL); };
    auto ypos = [&](double ber) {
        double v = std::log10(std::max(ber, kFloor));  // [-8, 0]
        return kT + (0.0 - v) / 8.0 * (kB - kT);
    };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    s << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    s << "<text x=\"" << (kL + kR) / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";

    // Decade gridlines and y labels.
    for (int d = 0; d >= -8; --d) {
        double y = ypos(std::pow(10.0, d));
        s << "<line x1=\"" << kL << "\" y1=\"" << fmt(y) << "\" x2=\"" << kR << "\" y2=\""
          << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
        s << "<text x=\"" << kL - 8 << "\" y=\"" << fmt(y + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << d
          << "</text>\n";
    }
    // X ticks at integer-ish steps.
    double span = xmax - xmin;
    double step = span <= 16 ? 2.0 : 5.0;
    for (double x = std::ceil(xmin / step) * step; x <= xmax + 1e-9; x += step) {
        double px = xpos(x);
        s << "<line x1=\"" << fmt(px) << "\" y1=\"" << kB << "\" x2=\"" << fmt(px) << "\" y2=\""
          << kB + 5 << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << fmt(px) << "\" y=\"" << kB + 20
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(x)
          << "</text>\n";
    }
    s << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kR - kL << "\" height=\""
      << kB - kT << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<text x=\"" << (kL + kR) / 2 << "\" y=\"" << kH - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">SNR (dB)</text>\n";
    s << "<text x=\"18\" y=\"" << (kT + kB) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 18 "
      << (kT + kB) / 2 << ")\">BER</text>\n";

    for (std::size_t di = 0; di < detectors.size(); ++di) {
        const auto& name = detectors[di];
        const char* color = kPalette[di % std::size(kPalette)];
        std::vector<const BerPoint*> line;
        for (const auto& p : points)
            if (p.detector == name) line.push_back(&p);
        std::stable_sort(line.begin(), line.end(),
                         [](const BerPoint* a, const BerPoint* b) { return a->snr_db < b->snr_db; });

        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto* p : line) s << fmt(xpos(p->snr_db)) << ',' << fmt(ypos(p->ber)) << ' ';
        s << "\"/>\n";
        for (const auto* p : line) {
            double px = xpos(p->snr_db), py = ypos(p->ber);
            if (p->ber <= 0.0) {
                // Zero-BER: open triangle at the declared 1e-8 floor.
                s << "<path d=\"M " << fmt(px) << ' ' << fmt(py - 5) << " L " << fmt(px - 5) << ' '
                  << fmt(py + 4) << " L " << fmt(px + 5) << ' ' << fmt(py + 4)
                  << " Z\" fill=\"white\" stroke=\"" << color << "\"/>\n";
            } else {
                s << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py) << "\" r=\"3\" fill=\""
                  << color << "\"/>\n";
            }
        }
        double ly = kT + 18 + 18 * static_cast<double>(di);
        s << "<line x1=\"" << kR + 12 << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << kR + 36
          << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        s << "<text x=\"" << kR + 42 << "\" y=\"" << fmt(ly)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << name << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

void emit_results(const std::vector<BerPoint>& points, RunManifest& manifest,
                  const std::string& out_dir) {
    if (points.empty()) throw std::invalid_argument("emit_results: no points");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("emit_results: cannot create " + out_dir);

    const std::string csv_path = out_dir + "/results.csv";
    const std::string svg_path = out_dir + "/ber.svg";
    const std::string manifest_path = out_dir + "/manifest.json";

    {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw std::runtime_error("emit_results: cannot write " + csv_path);
        write_results_csv(points, csv);
    }
    {
        std::ofstream svg(svg_path, std::ios::binary);
        if (!svg) throw std::runtime_error("emit_results: cannot write " + svg_path);
        svg << render_ber_svg(points, "BER vs SNR");
    }
    manifest.outputs = {csv_path, svg_path, manifest_path};
    {
        json mj;
        mj["tool_version"] = manifest.tool_version;
        mj["config_digest"] = manifest.config_digest;
        mj["wall_seconds"] = manifest.wall_seconds;
        mj["resolved_config"] = manifest.resolved_config;
        mj["outputs"] = manifest.outputs;
        std::ofstream mf(manifest_path, std::ios::binary);
        if (!mf) throw std::runtime_error("emit_results: cannot write " + manifest_path);
        mf << mj.dump(2) << '\n';
    }
}

}  // namespace satrx
