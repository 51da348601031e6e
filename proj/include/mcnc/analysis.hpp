// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcnc/modem.hpp"
#include "mcnc/numerics.hpp"
#include "mcnc/precoding.hpp"
#include "mcnc/receiver.hpp"

namespace mcnc {

// ---------------------------------------------------------------------------
// Link quality

/// Mean over data subcarriers of |sum_k alpha_k h v|^2.
inline double coherent_gain_power(const Grid& channel, const PrecodingMatrix& v, std::span<const double> alpha) {
    return mean_power(equalizer_denominator(channel, v, alpha));
}

/// Received distortion spectra d_{k,n}: DFT of (clipped - alpha_k clean) per antenna.
inline Grid distortion_spectra(std::span<const CVec> clean, std::span<const CVec> clipped, std::span<const double> alpha,
                               const OfdmConfig& cfg) {
    if (clean.size() != clipped.size() || clean.size() != alpha.size())
        throw SizingError("distortion spectra: antenna counts differ");
    Grid d(clean.size(), cfg.data_subcarriers);
    for (std::size_t k = 0; k < clean.size(); ++k) {
        if (clean[k].size() != clipped[k].size())
            throw SizingError("distortion spectra: frame lengths differ");
        CVec residual(clean[k].size());
        for (std::size_t t = 0; t < residual.size(); ++t)
            residual[t] = clipped[k][t] - alpha[k] * clean[k][t];
        const CVec spectrum = ofdm_demodulate(residual, cfg);
        for (std::size_t n = 0; n < spectrum.size(); ++n)
            d(k, n) = spectrum[n];
    }
    return d;
}

/// Numerator and denominator of the SDR, kept apart so they can be summed
/// over many OFDM symbols before taking the ratio.
struct SdrTerms {
    double wanted = 0.0;
    double distortion = 0.0;

    SdrTerms& operator+=(const SdrTerms& o) {
        wanted += o.wanted;
        distortion += o.distortion;
        return *this;
    }

    /// +inf when no distortion reaches the receiver.
    double db() const {
        if (!(distortion > 0.0))
            return std::numeric_limits<double>::infinity();
        return linear_to_db(wanted / distortion);
    }
};

inline SdrTerms sdr_terms(const Grid& channel, const PrecodingMatrix& v, std::span<const double> alpha,
                          const Grid& distortion, double symbol_power) {
    if (distortion.rows() != channel.rows() || distortion.cols() != channel.cols())
        throw SizingError("sdr: distortion grid does not match the channel");
    SdrTerms t;
    const CVec wanted = equalizer_denominator(channel, v, alpha);
    for (std::size_t n = 0; n < channel.cols(); ++n) {
        cplx received{};
        for (std::size_t k = 0; k < channel.rows(); ++k)
            received += channel(k, n) * distortion(k, n);
        t.wanted += symbol_power * std::norm(wanted[n]);
        t.distortion += std::norm(received);
    }
    return t;
}

inline double sdr_db(const Grid& channel, const PrecodingMatrix& v, std::span<const double> alpha, const Grid& distortion,
                     double symbol_power) {
    return sdr_terms(channel, v, alpha, distortion, symbol_power).db();
}

struct SnrPair {
    double snr_db;
    double ebn0_db;
};

inline double ebn0_from_snr_db(double snr_db, unsigned qam_order) {
    return snr_db - linear_to_db(std::log2(static_cast<double>(qam_order)));
}

inline double snr_from_ebn0_db(double ebn0_db, unsigned qam_order) {
    return ebn0_db + linear_to_db(std::log2(static_cast<double>(qam_order)));
}

inline SnrPair snr_and_ebn0(const Grid& channel, const PrecodingMatrix& v, std::span<const double> alpha,
                            double noise_power, double symbol_power, unsigned qam_order) {
    if (!(noise_power > 0.0))
        throw SizingError("noise power must be positive to define an SNR");
    const double snr = linear_to_db(symbol_power * coherent_gain_power(channel, v, alpha) / noise_power);
    return {snr, ebn0_from_snr_db(snr, qam_order)};
}

/// Per-subcarrier noise power that yields the requested Eb/N0. Infinite
/// Eb/N0 gives zero noise.
inline double noise_power_for_ebn0(const Grid& channel, const PrecodingMatrix& v, std::span<const double> alpha,
                                   double symbol_power, unsigned qam_order, double ebn0_db) {
    if (std::isinf(ebn0_db) && ebn0_db > 0)
        return 0.0;
    const double snr = db_to_linear(snr_from_ebn0_db(ebn0_db, qam_order));
    return symbol_power * coherent_gain_power(channel, v, alpha) / snr;
}

inline std::uint64_t count_bit_errors(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size())
        throw SizingError("bit streams differ in length: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    std::uint64_t e = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        e += (a[i] & 1u) != (b[i] & 1u);
    return e;
}

inline double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
    const auto e = count_bit_errors(tx, rx);
    return tx.empty() ? 0.0 : static_cast<double>(e) / static_cast<double>(tx.size());
}

// ---------------------------------------------------------------------------
// Operation-count model for the three receivers.
//
// Building blocks, in real operations:
//   FFT/IFFT      adds 5(N/2)log2N + 2N log2N, mults 3(N/2)log2N
//   detection     adds 6 N_U sqrt(M),          mults 4 N_U sqrt(M)
//   equalization, SISO precoding, SISO propagation: adds 5 N_U, mults 3 N_U
//   soft limiter  adds 70N, mults 5N  (includes a 23-step CORDIC square root)
//   division by alpha: 2 N_U

enum class ReceiverKind { standard, cnc, mcnc };

inline std::string_view to_string(ReceiverKind k) {
    switch (k) {
    case ReceiverKind::standard:
        return "standard";
    case ReceiverKind::cnc:
        return "cnc";
    case ReceiverKind::mcnc:
        return "mcnc";
    }
    return "?";
}

struct ComplexityParams {
    unsigned qam_order = 64;
    std::size_t fft_size = 4096;
    std::size_t data_subcarriers = 2048;
    std::size_t antennas = 64;
    std::size_t iterations = 0;

    void validate() const {
        if (!is_power_of_two(fft_size))
            throw SizingError("complexity: N must be a power of two");
        if (data_subcarriers == 0 || data_subcarriers > fft_size)
            throw SizingError("complexity: need 0 < N_U <= N");
        if (qam_order < 4 || antennas == 0)
            throw SizingError("complexity: invalid M or K");
    }
};

struct OperationCount {
    double additions = 0.0;
    double multiplications = 0.0;
    double additions_per_subcarrier = 0.0;
    double multiplications_per_subcarrier = 0.0;
};

inline OperationCount complexity(ReceiverKind kind, const ComplexityParams& p) {
    p.validate();
    const double n = static_cast<double>(p.fft_size);
    const double nu = static_cast<double>(p.data_subcarriers);
    const double k = static_cast<double>(p.antennas);
    const double it = static_cast<double>(p.iterations);
    const double log2n = std::log2(n);
    const double sqrt_m = std::sqrt(static_cast<double>(p.qam_order));

    const double fft_add = 5.0 * (n / 2.0) * log2n + 2.0 * n * log2n;
    const double fft_mul = 3.0 * (n / 2.0) * log2n;
    const double det_add = 6.0 * nu * sqrt_m;
    const double det_mul = 4.0 * nu * sqrt_m;

    double add = 5.0 * nu + fft_add + det_add;
    double mul = 3.0 * nu + fft_mul + det_mul;

    switch (kind) {
    case ReceiverKind::standard:
        break;
    case ReceiverKind::cnc:
        add += it * (2.0 * fft_add + 70.0 * n + 2.0 * nu + det_add);
        mul += it * (2.0 * fft_mul + 5.0 * n + 2.0 * nu + det_mul);
        break;
    case ReceiverKind::mcnc:
        add += it * ((k + 1.0) * fft_add + 70.0 * k * n + (2.0 * k + 1.0) * 5.0 * nu + (k - 1.0) * nu + 2.0 * nu +
                     det_add);
        mul += it * ((k + 1.0) * fft_mul + 5.0 * k * n + (2.0 * k + 1.0) * 3.0 * nu + det_mul);
        break;
    }
    return {add, mul, add / nu, mul / nu};
}

} // namespace mcnc
