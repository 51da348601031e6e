// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mcnc/numerics.hpp"

namespace mcnc {

/// Per-antenna, per-subcarrier precoding coefficients v_{k,n} (K x N_U).
/// Every constructor normalizes each subcarrier to unit total power.
class PrecodingMatrix {
  public:
    PrecodingMatrix() = default;
    explicit PrecodingMatrix(Grid coeffs) : coeffs_(std::move(coeffs)) {}

    std::size_t antennas() const noexcept { return coeffs_.rows(); }
    std::size_t subcarriers() const noexcept { return coeffs_.cols(); }
    const Grid& coeffs() const noexcept { return coeffs_; }
    cplx operator()(std::size_t k, std::size_t n) const { return coeffs_(k, n); }

    /// Sum over subcarriers of |v_{k,n}|^2 for one antenna.
    double antenna_power(std::size_t k) const { return energy(coeffs_.row(k)); }

  private:
    Grid coeffs_;
};

/// Equal-magnitude precoder with one fixed phase per antenna.
struct PhaseOnlyPrecoder {
    std::vector<double> phases;
};

/// Maximum ratio transmission: v_{k,n} = h*_{k,n} / ||h_n||.
inline PrecodingMatrix mrt(const Grid& channel) {
    const std::size_t k_count = channel.rows();
    const std::size_t n_count = channel.cols();
    Grid v(k_count, n_count);
    for (std::size_t n = 0; n < n_count; ++n) {
        double norm2 = 0.0;
        for (std::size_t k = 0; k < k_count; ++k)
            norm2 += std::norm(channel(k, n));
        if (!(norm2 > 0.0))
            throw SingularChannelError(n);
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t k = 0; k < k_count; ++k)
            v(k, n) = std::conj(channel(k, n)) * inv;
    }
    return PrecodingMatrix(std::move(v));
}

inline PrecodingMatrix phase_only_matrix(const PhaseOnlyPrecoder& p, std::size_t data_subcarriers) {
    if (p.phases.empty())
        throw SizingError("phase-only precoder needs at least one antenna");
    const double amp = 1.0 / std::sqrt(static_cast<double>(p.phases.size()));
    Grid v(p.phases.size(), data_subcarriers);
    for (std::size_t k = 0; k < p.phases.size(); ++k) {
        const cplx c = std::polar(amp, p.phases[k]);
        for (std::size_t n = 0; n < data_subcarriers; ++n)
            v(k, n) = c;
    }
    return PrecodingMatrix(std::move(v));
}

/// Phase-only precoder co-phasing the channel at one reference subcarrier.
inline PhaseOnlyPrecoder phase_only_from_channel(const Grid& channel, std::size_t reference_subcarrier) {
    PhaseOnlyPrecoder p;
    p.phases.resize(channel.rows());
    for (std::size_t k = 0; k < channel.rows(); ++k)
        p.phases[k] = -std::arg(channel(k, reference_subcarrier));
    return p;
}

/// x_{k,n} = s_n v_{k,n}.
inline Grid apply(std::span<const cplx> symbols, const PrecodingMatrix& v) {
    if (symbols.size() != v.subcarriers())
        throw SizingError("symbol vector length " + std::to_string(symbols.size()) + " does not match precoder width " +
                          std::to_string(v.subcarriers()));
    Grid x(v.antennas(), v.subcarriers());
    for (std::size_t k = 0; k < v.antennas(); ++k)
        for (std::size_t n = 0; n < v.subcarriers(); ++n)
            x(k, n) = symbols[n] * v(k, n);
    return x;
}

} // namespace mcnc
