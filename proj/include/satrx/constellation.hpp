// SPDX-License-Identifier: Apache-2.0
//
// Transmit symbol alphabets: BPSK/QPSK/8PSK with Gray labels and DVB-S2
// style 16APSK (4+12 rings). All alphabets are zero-mean and normalized to
// unit average energy.

#ifndef SATRX_CONSTELLATION_HPP
#define SATRX_CONSTELLATION_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace satrx {

using cxd = std::complex<double>;

enum class ConstellationKind { BPSK, QPSK, PSK8, APSK16 };

std::string to_string(ConstellationKind kind);
ConstellationKind constellation_kind_from_name(std::string_view name);

struct Constellation {
    ConstellationKind kind;
    std::vector<cxd> points;              // K points, unit average energy
    std::vector<std::uint32_t> bit_labels;  // label of point i, log2(K) bits
    double radius_ratio = 0.0;            // R2/R1, 16APSK only

    std::size_t size() const { return points.size(); }
    int bits_per_symbol() const { return bits_; }
    // Point index carrying a given bit label.
    std::size_t index_of_label(std::uint32_t label) const { return label_to_index_[label]; }

    friend Constellation build_constellation(ConstellationKind, double);

private:
    int bits_ = 0;
    std::vector<std::size_t> label_to_index_;
};

// radius_ratio applies to APSK16 only and must exceed 1.
Constellation build_constellation(ConstellationKind kind, double radius_ratio = 2.85);

// Index of the nearest constellation point; ties go to the lowest index.
std::size_t nearest_point(const Constellation& c, cxd sample);

// Maps consecutive log2(K)-bit groups (MSB first) onto points.
std::vector<cxd> modulate(const Constellation& c, std::span<const std::uint8_t> bits);

// Nearest-point hard decision back to a bit string.
std::vector<std::uint8_t> demap_hard(const Constellation& c, std::span<const cxd> symbols);

// Unpacks a label into log2(K) bits, MSB first.
std::vector<std::uint8_t> label_bits(const Constellation& c, std::uint32_t label);

}  // namespace satrx

#endif
