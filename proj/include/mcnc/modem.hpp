// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcnc/numerics.hpp"

namespace mcnc {

/// OFDM numerology. Data occupy the symmetric index set
/// {-N_U/2, ..., -1, 1, ..., N_U/2}; DC and the band edges stay empty.
struct OfdmConfig {
    std::size_t fft_size = 256;
    std::size_t data_subcarriers = 128;
    std::size_t cp_length = 16;
    double subcarrier_spacing_hz = 15e3;
    double carrier_hz = 3.5e9;

    /// Defaults with N_CP = N/16.
    static OfdmConfig with_size(std::size_t fft_size, std::size_t data_subcarriers) {
        OfdmConfig c;
        c.fft_size = fft_size;
        c.data_subcarriers = data_subcarriers;
        c.cp_length = fft_size / 16;
        return c;
    }

    void validate() const {
        if (!is_power_of_two(fft_size))
            throw SizingError("fft_size must be a power of two");
        if (data_subcarriers == 0 || data_subcarriers % 2 != 0)
            throw SizingError("data_subcarriers must be a positive even number");
        if (data_subcarriers > fft_size - 1 || data_subcarriers / 2 > fft_size / 2 - 1)
            throw SizingError("data_subcarriers does not fit the FFT with DC and Nyquist bins unused");
        if (cp_length > fft_size)
            throw SizingError("cp_length longer than the FFT");
        if (!(subcarrier_spacing_hz > 0.0) || !(carrier_hz > 0.0))
            throw SizingError("subcarrier spacing and carrier frequency must be positive");
    }

    std::size_t frame_length() const { return fft_size + cp_length; }

    /// Signed subcarrier index n for data position i in [0, N_U).
    long subcarrier_index(std::size_t i) const {
        const long half = static_cast<long>(data_subcarriers / 2);
        const long ii = static_cast<long>(i);
        return ii < half ? ii - half : ii - half + 1;
    }

    /// FFT bin holding data position i.
    std::size_t bin(std::size_t i) const {
        const long n = subcarrier_index(i);
        return n >= 0 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(static_cast<long>(fft_size) + n);
    }

    double subcarrier_frequency(std::size_t i) const {
        return carrier_hz + static_cast<double>(subcarrier_index(i)) * subcarrier_spacing_hz;
    }
};

/// Square Gray-coded QAM with unit mean symbol power.
///
/// Labels are log2(M) bits, most significant first; the first half selects
/// the in-phase level, the second half the quadrature level. Along each axis
/// level index j counts down from the most positive amplitude, and the axis
/// label is the reflected Gray code of j. So the all-zero label is the
/// upper-right corner point, e.g. QPSK bits 00 -> (+1+j)/sqrt(2).
class Constellation {
  public:
    explicit Constellation(unsigned order) : order_(order) {
        if (order != 4 && order != 16 && order != 64 && order != 256)
            throw SizingError("QAM order must be one of 4, 16, 64, 256");
        bits_ = static_cast<unsigned>(std::countr_zero(order));
        levels_ = 1u << (bits_ / 2);
        norm_ = std::sqrt(2.0 * (static_cast<double>(order) - 1.0) / 3.0);
        points_.resize(order);
        for (unsigned label = 0; label < order; ++label)
            points_[label] = point(label);
    }

    unsigned order() const noexcept { return order_; }
    unsigned bits_per_symbol() const noexcept { return bits_; }
    unsigned levels_per_axis() const noexcept { return levels_; }
    /// Half the minimum distance between points.
    double half_spacing() const noexcept { return 1.0 / norm_; }
    const std::vector<cplx>& points() const noexcept { return points_; }

    cplx point(unsigned label) const {
        const unsigned axis_bits = bits_ / 2;
        const unsigned mask = levels_ - 1;
        const unsigned gi = (label >> axis_bits) & mask;
        const unsigned gq = label & mask;
        return {amplitude(gray_to_index(gi)), amplitude(gray_to_index(gq))};
    }

    /// Nearest point, sliced independently per axis. Exact ties go to the
    /// larger level.
    cplx detect(cplx g) const { return {amplitude(slice(g.real())), amplitude(slice(g.imag()))}; }

    unsigned detect_label(cplx g) const {
        const unsigned ji = slice(g.real());
        const unsigned jq = slice(g.imag());
        return (index_to_gray(ji) << (bits_ / 2)) | index_to_gray(jq);
    }

    /// Map a bit stream (one bit per byte, 0/1) onto symbols.
    CVec map(std::span<const std::uint8_t> bits) const {
        if (bits.size() % bits_ != 0)
            throw SizingError("bit count " + std::to_string(bits.size()) + " is not a multiple of log2(M) = " +
                              std::to_string(bits_));
        CVec out(bits.size() / bits_);
        for (std::size_t s = 0; s < out.size(); ++s) {
            unsigned label = 0;
            for (unsigned b = 0; b < bits_; ++b)
                label = (label << 1) | (bits[s * bits_ + b] & 1u);
            out[s] = points_[label];
        }
        return out;
    }

    /// Hard decisions straight to bits.
    std::vector<std::uint8_t> demap(std::span<const cplx> symbols) const {
        std::vector<std::uint8_t> out(symbols.size() * bits_);
        for (std::size_t s = 0; s < symbols.size(); ++s) {
            const unsigned label = detect_label(symbols[s]);
            for (unsigned b = 0; b < bits_; ++b)
                out[s * bits_ + b] = static_cast<std::uint8_t>((label >> (bits_ - 1 - b)) & 1u);
        }
        return out;
    }

  private:
    double amplitude(unsigned j) const { return (static_cast<double>(levels_) - 1.0 - 2.0 * j) / norm_; }

    unsigned slice(double x) const {
        const double u = (static_cast<double>(levels_) - 1.0 - x * norm_) / 2.0;
        const double j = std::ceil(u - 0.5);
        if (!(j > 0.0))
            return 0;
        if (j >= static_cast<double>(levels_ - 1))
            return levels_ - 1;
        return static_cast<unsigned>(j);
    }

    static unsigned index_to_gray(unsigned j) { return j ^ (j >> 1); }
    static unsigned gray_to_index(unsigned g) {
        unsigned j = g;
        for (unsigned shift = 1; shift < 16; shift <<= 1)
            j ^= j >> shift;
        return j;
    }

    unsigned order_;
    unsigned bits_ = 0;
    unsigned levels_ = 0;
    double norm_ = 1.0;
    std::vector<cplx> points_;
};

inline CVec map_bits(std::span<const std::uint8_t> bits, const Constellation& c) { return c.map(bits); }

inline cplx hard_detect(cplx g, const Constellation& c) { return c.detect(g); }

inline CVec hard_detect(std::span<const cplx> g, const Constellation& c) {
    CVec out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = c.detect(g[i]);
    return out;
}

/// Place N_U data values on their bins, inverse unitary DFT, prepend the cyclic prefix.
inline CVec ofdm_modulate(std::span<const cplx> row, const OfdmConfig& cfg) {
    if (row.size() != cfg.data_subcarriers)
        throw SizingError("modulator expects " + std::to_string(cfg.data_subcarriers) + " data values, got " +
                          std::to_string(row.size()));
    const std::size_t n = cfg.fft_size;
    const std::size_t cp = cfg.cp_length;
    CVec frame(cp + n);
    std::span<cplx> body(frame.data() + cp, n);
    for (std::size_t i = 0; i < row.size(); ++i)
        body[cfg.bin(i)] = row[i];
    fft_plan(n).transform(body, Direction::inverse);
    for (std::size_t t = 0; t < cp; ++t)
        frame[t] = body[n - cp + t];
    return frame;
}

/// Strip the cyclic prefix, forward unitary DFT, pick the data bins.
inline CVec ofdm_demodulate(std::span<const cplx> frame, const OfdmConfig& cfg) {
    if (frame.size() != cfg.frame_length())
        throw SizingError("frame length " + std::to_string(frame.size()) + " differs from N + N_CP = " +
                          std::to_string(cfg.frame_length()));
    CVec body(frame.begin() + static_cast<std::ptrdiff_t>(cfg.cp_length), frame.end());
    fft_plan(cfg.fft_size).transform(body, Direction::forward);
    CVec row(cfg.data_subcarriers);
    for (std::size_t i = 0; i < row.size(); ++i)
        row[i] = body[cfg.bin(i)];
    return row;
}

} // namespace mcnc
