// SPDX-License-Identifier: Apache-2.0

#include "satrx/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace satrx {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint32_t gray(std::uint32_t i) { return i ^ (i >> 1); }

// Gray-labelled PSK with the phase reference at angle 0, counterclockwise.
void fill_psk(Constellation& c, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
        double ang = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(k);
        c.points.push_back(cxd{std::cos(ang), std::sin(ang)});
        c.bit_labels.push_back(gray(static_cast<std::uint32_t>(i)));
    }
}

// 4+12 APSK. Inner ring at pi/4 + q*pi/2, outer ring at pi/12 + k*pi/6.
// Labels: the two high bits Gray-code the quadrant, the two low bits pick
// inner (00) or the outer point at 15/45/75 degrees within the quadrant
// (01/11/10), so ring/offset transitions inside a quadrant flip one bit.
void fill_apsk16(Constellation& c, double ratio) {
    const double r1 = 4.0 / std::sqrt(4.0 + 12.0 * ratio * ratio);
    const double r2 = ratio * r1;
    for (int q = 0; q < 4; ++q) {
        double ang = kPi / 4.0 + q * kPi / 2.0;
        c.points.push_back(r1 * cxd{std::cos(ang), std::sin(ang)});
        c.bit_labels.push_back(gray(static_cast<std::uint32_t>(q)) << 2);
    }
    static constexpr std::uint32_t offset_bits[3] = {0b01, 0b11, 0b10};
    for (int k = 0; k < 12; ++k) {
        double ang = kPi / 12.0 + k * kPi / 6.0;
        c.points.push_back(r2 * cxd{std::cos(ang), std::sin(ang)});
        c.bit_labels.push_back((gray(static_cast<std::uint32_t>(k / 3)) << 2) | offset_bits[k % 3]);
    }
}

void check_invariants(const Constellation& c) {
    const std::size_t k = c.points.size();
    double energy = 0.0;
    cxd mean{0.0, 0.0};
    for (auto p : c.points) {
        energy += std::norm(p);
        mean += p;
    }
    energy /= static_cast<double>(k);
    mean /= static_cast<double>(k);
    if (std::abs(energy - 1.0) > 1e-12)
        throw std::logic_error("constellation energy not normalized");
    if (std::abs(mean) > 1e-12)
        throw std::logic_error("constellation mean not zero");
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if (std::abs(c.points[i] - c.points[j]) < 1e-12)
                throw std::logic_error("constellation points not distinct");
}

}  // namespace

std::string to_string(ConstellationKind kind) {
    switch (kind) {
        case ConstellationKind::BPSK: return "bpsk";
        case ConstellationKind::QPSK: return "qpsk";
        case ConstellationKind::PSK8: return "8psk";
        case ConstellationKind::APSK16: return "16apsk";
    }
    return "?";
}

ConstellationKind constellation_kind_from_name(std::string_view name) {
    if (name == "bpsk") return ConstellationKind::BPSK;
    if (name == "qpsk") return ConstellationKind::QPSK;
    if (name == "8psk") return ConstellationKind::PSK8;
    if (name == "16apsk") return ConstellationKind::APSK16;
    throw std::invalid_argument("unknown constellation kind: " + std::string(name));
}

Constellation build_constellation(ConstellationKind kind, double radius_ratio) {
    Constellation c;
    c.kind = kind;
    switch (kind) {
        case ConstellationKind::BPSK:
            c.points = {cxd{1.0, 0.0}, cxd{-1.0, 0.0}};
            c.bit_labels = {0u, 1u};
            break;
        case ConstellationKind::QPSK:
            fill_psk(c, 4);
            break;
        case ConstellationKind::PSK8:
            fill_psk(c, 8);
            break;
        case ConstellationKind::APSK16:
            if (!(radius_ratio > 1.0))
                throw std::invalid_argument("16APSK radius ratio must exceed 1");
            c.radius_ratio = radius_ratio;
            fill_apsk16(c, radius_ratio);
            break;
    }

    const std::size_t k = c.points.size();
    c.bits_ = 0;
    while ((1u << c.bits_) < k) ++c.bits_;
    c.label_to_index_.assign(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        std::uint32_t lab = c.bit_labels[i];
        if (lab >= k || c.label_to_index_[lab] != k)
            throw std::logic_error("bit labels are not a bijection");
        c.label_to_index_[lab] = i;
    }
    check_invariants(c);
    return c;
}

std::size_t nearest_point(const Constellation& c, cxd sample) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        double d = std::norm(sample - c.points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<cxd> modulate(const Constellation& c, std::span<const std::uint8_t> bits) {
    const int n = c.bits_per_symbol();
    if (bits.size() % static_cast<std::size_t>(n) != 0)
        throw std::invalid_argument("bit count not divisible by bits per symbol");
    std::vector<cxd> out;
    out.reserve(bits.size() / n);
    for (std::size_t i = 0; i < bits.size(); i += n) {
        std::uint32_t label = 0;
        for (int b = 0; b < n; ++b) label = (label << 1) | (bits[i + b] & 1u);
        out.push_back(c.points[c.index_of_label(label)]);
    }
    return out;
}

std::vector<std::uint8_t> demap_hard(const Constellation& c, std::span<const cxd> symbols) {
    const int n = c.bits_per_symbol();
    std::vector<std::uint8_t> out;
    out.reserve(symbols.size() * n);
    for (auto s : symbols) {
        std::uint32_t label = c.bit_labels[nearest_point(c, s)];
        for (int b = n - 1; b >= 0; --b) out.push_back((label >> b) & 1u);
    }
    return out;
}

std::vector<std::uint8_t> label_bits(const Constellation& c, std::uint32_t label) {
    const int n = c.bits_per_symbol();
    std::vector<std::uint8_t> out(n);
    for (int b = 0; b < n; ++b) out[b] = (label >> (n - 1 - b)) & 1u;
    return out;
}

}  // namespace satrx
