// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-subcarrier MISO channels (free-space LOS, two-ray ground reflection,
// IID Rayleigh), propagation of transmitted frames, receiver noise and
// channel-estimate corruption.

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include "mcnc/modem.hpp"
#include "mcnc/numerics.hpp"
#include "mcnc/precoding.hpp"

namespace mcnc {

inline constexpr double speed_of_light = 299792458.0;

enum class ChannelModel { los, two_path, rayleigh };

inline std::string_view to_string(ChannelModel m) {
    switch (m) {
    case ChannelModel::los:
        return "los";
    case ChannelModel::two_path:
        return "two-path";
    case ChannelModel::rayleigh:
        return "rayleigh";
    }
    return "?";
}

/// Uniform linear array along the x axis, centred at the origin.
struct ArrayGeometry {
    std::size_t antennas = 64;
    double spacing_m = 0.0;
    double height_m = 15.0;

    static ArrayGeometry half_wavelength(std::size_t antennas, double carrier_hz, double height_m = 15.0) {
        return {antennas, speed_of_light / carrier_hz / 2.0, height_m};
    }

    void validate() const {
        if (antennas == 0)
            throw SizingError("array needs at least one element");
        if (!(spacing_m > 0.0))
            throw SizingError("element spacing must be positive");
    }

    std::array<double, 3> element_position(std::size_t k) const {
        const double x = (static_cast<double>(k) - (static_cast<double>(antennas) - 1.0) / 2.0) * spacing_m;
        return {x, 0.0, height_m};
    }
};

/// Receiver reference position. Azimuth is measured from array broadside
/// (the +y axis) toward the array axis. Positions are jittered uniformly in
/// a horizontal square of side jitter_box_m centred on the reference.
struct ReceiverPlacement {
    double distance_m = 300.0;
    double azimuth_deg = 45.0;
    double height_m = 1.5;
    double jitter_box_m = 10.0;

    std::array<double, 3> reference_position() const {
        const double az = azimuth_deg * std::numbers::pi / 180.0;
        return {distance_m * std::sin(az), distance_m * std::cos(az), height_m};
    }

    std::array<double, 3> draw(RngStream& rng) const {
        auto p = reference_position();
        if (jitter_box_m > 0.0) {
            p[0] += rng.uniform(-jitter_box_m / 2.0, jitter_box_m / 2.0);
            p[1] += rng.uniform(-jitter_box_m / 2.0, jitter_box_m / 2.0);
        }
        return p;
    }
};

struct ChannelRealization {
    Grid gains; // K x N_U
    ChannelModel model = ChannelModel::rayleigh;

    std::size_t antennas() const noexcept { return gains.rows(); }
    std::size_t subcarriers() const noexcept { return gains.cols(); }
};

inline PrecodingMatrix mrt(const ChannelRealization& h) { return mrt(h.gains); }

inline double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Free-space response of one ray of length d at frequency f.
inline cplx free_space_gain(double d, double f) {
    return std::polar(speed_of_light / (4.0 * std::numbers::pi * d * f),
                      -2.0 * std::numbers::pi * std::fmod(d * f / speed_of_light, 1.0));
}

/// Direct ray plus (optionally) a ground-reflected ray from the image of
/// each element mirrored below z = 0.
inline ChannelRealization ray_channel(const ArrayGeometry& geom, const std::array<double, 3>& rx, const OfdmConfig& cfg,
                                      double reflection, ChannelModel tag) {
    geom.validate();
    cfg.validate();
    ChannelRealization out{Grid(geom.antennas, cfg.data_subcarriers), tag};
    for (std::size_t k = 0; k < geom.antennas; ++k) {
        const auto tx = geom.element_position(k);
        const double direct = distance(tx, rx);
        if (!(direct > 0.0))
            throw SizingError("zero distance between element " + std::to_string(k) + " and receiver");
        const std::array<double, 3> image{tx[0], tx[1], -tx[2]};
        const double reflected = distance(image, rx);
        for (std::size_t n = 0; n < cfg.data_subcarriers; ++n) {
            const double f = cfg.subcarrier_frequency(n);
            cplx h = free_space_gain(direct, f);
            if (reflection != 0.0)
                h += reflection * free_space_gain(reflected, f);
            out.gains(k, n) = h;
        }
    }
    return out;
}

inline ChannelRealization los_at(const ArrayGeometry& geom, const std::array<double, 3>& rx, const OfdmConfig& cfg) {
    return ray_channel(geom, rx, cfg, 0.0, ChannelModel::los);
}

inline ChannelRealization two_path_at(const ArrayGeometry& geom, const std::array<double, 3>& rx, const OfdmConfig& cfg,
                                      double reflection = -1.0) {
    if (geom.height_m <= 0.0 || rx[2] < 0.0)
        throw SizingError("two-path model needs the array above ground and the receiver not below it");
    return ray_channel(geom, rx, cfg, reflection, ChannelModel::two_path);
}

/// LOS channel at a jittered receiver position.
inline ChannelRealization los(const ArrayGeometry& geom, const ReceiverPlacement& placement, const OfdmConfig& cfg,
                              RngStream& rng) {
    if (!(placement.distance_m > 0.0))
        throw SizingError("receiver distance must be positive");
    return los_at(geom, placement.draw(rng), cfg);
}

inline ChannelRealization two_path(const ArrayGeometry& geom, const ReceiverPlacement& placement, const OfdmConfig& cfg,
                                   RngStream& rng, double reflection = -1.0) {
    if (!(placement.distance_m > 0.0))
        throw SizingError("receiver distance must be positive");
    return two_path_at(geom, placement.draw(rng), cfg, reflection);
}

/// Unit-variance IID complex Gaussian per antenna and subcarrier.
inline ChannelRealization rayleigh(std::size_t antennas, std::size_t subcarriers, RngStream& rng) {
    if (antennas == 0 || subcarriers == 0)
        throw SizingError("rayleigh channel needs K >= 1 and N_U >= 1");
    ChannelRealization out{Grid(antennas, subcarriers), ChannelModel::rayleigh};
    for (std::size_t k = 0; k < antennas; ++k)
        for (std::size_t n = 0; n < subcarriers; ++n)
            out.gains(k, n) = rng.gaussian(1.0);
    return out;
}

/// Noiseless received spectrum on the data subcarriers:
/// r_n = sum_k DFT{frame_k}_n h_{k,n}.
inline CVec propagate(std::span<const CVec> frames, const Grid& gains, const OfdmConfig& cfg) {
    if (frames.size() != gains.rows())
        throw SizingError("propagate: " + std::to_string(frames.size()) + " frames for a " +
                          std::to_string(gains.rows()) + "-antenna channel");
    if (gains.cols() != cfg.data_subcarriers)
        throw SizingError("propagate: channel width does not match N_U");
    CVec r(cfg.data_subcarriers);
    for (std::size_t k = 0; k < frames.size(); ++k) {
        const CVec spectrum = ofdm_demodulate(frames[k], cfg);
        for (std::size_t n = 0; n < r.size(); ++n)
            r[n] += spectrum[n] * gains(k, n);
    }
    return r;
}

inline CVec propagate(std::span<const CVec> frames, const ChannelRealization& h, const OfdmConfig& cfg) {
    return propagate(frames, h.gains, cfg);
}

/// Add circular complex Gaussian noise of the given per-subcarrier power.
inline CVec add_awgn(std::span<const cplx> r, double noise_power, RngStream& rng) {
    if (!(noise_power >= 0.0))
        throw SizingError("noise power must be non-negative");
    CVec out(r.begin(), r.end());
    if (noise_power == 0.0)
        return out;
    for (auto& x : out)
        x += rng.gaussian(noise_power);
    return out;
}

/// Imperfect channel estimate sqrt(1-eps^2) h + eps w, where w is complex
/// Gaussian scaled per antenna to the mean channel gain over the data subcarriers.
inline ChannelRealization corrupt_csi(const ChannelRealization& h, double eps, RngStream& rng) {
    if (!(eps >= 0.0 && eps <= 1.0))
        throw SizingError("CSI error epsilon must lie in [0, 1]");
    ChannelRealization out = h;
    if (eps == 0.0)
        return out;
    const double keep = std::sqrt(1.0 - eps * eps);
    for (std::size_t k = 0; k < h.antennas(); ++k) {
        const double gain = std::sqrt(mean_power(h.gains.row(k)));
        for (std::size_t n = 0; n < h.subcarriers(); ++n)
            out.gains(k, n) = keep * h.gains(k, n) + eps * gain * rng.gaussian(1.0);
    }
    return out;
}

} // namespace mcnc
