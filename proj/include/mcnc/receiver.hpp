// SPDX-License-Identifier: Apache-2.0
#pragma once

// Zero-forcing detection and the two iterative clipping-noise-cancellation
// receivers.
//
// Both iterative receivers share one loop:
//   g^0 = r / D,  D_n = sum_k alpha_k h_{k,n} v_{k,n}
//   s^i = detect(g^i)
//   g~^i = regenerate(s^i)            (receiver-side copy of the TX chain)
//   q^i  = g~^i - s^i                 (estimated distortion after equalization)
//   g^{i+1} = g^0 - q^i
// MCNC regenerates through every antenna's precoder, amplifier and channel;
// CNC through a single unprecoded amplifier at K = 1 scaling divided by alpha.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcnc/channel.hpp"
#include "mcnc/frontend.hpp"
#include "mcnc/modem.hpp"
#include "mcnc/precoding.hpp"

namespace mcnc {

/// Everything MCNC needs to rebuild the received signal.
struct ReceiverSideInfo {
    Grid channel; // receiver's channel estimate, K x N_U
    PrecodingMatrix precoder;
    std::vector<double> alpha; // per antenna
    AmplifierModel amplifier;
    OfdmConfig cfg;
    Constellation constellation{64};

    void validate() const {
        if (channel.rows() != precoder.antennas() || channel.cols() != precoder.subcarriers())
            throw SizingError("side info: channel and precoder dimensions differ");
        if (alpha.size() != channel.rows())
            throw SizingError("side info: need one Bussgang gain per antenna");
        if (channel.cols() != cfg.data_subcarriers)
            throw SizingError("side info: channel width does not match N_U");
    }
};

/// Reduced side info for CNC: scalar alpha, equalizer denominator and the
/// amplifier at single-antenna scaling.
struct CncSideInfo {
    CVec denominator;
    double alpha = 1.0;
    AmplifierModel amplifier;
    OfdmConfig cfg;
    Constellation constellation{64};
};

struct IterationTrace {
    std::vector<CVec> decisions;  // s^0 .. s^I
    std::vector<CVec> distortion; // q^0 .. q^{I-1}
    std::vector<CVec> refined;    // g^1 .. g^I
};

struct Reception {
    CVec symbols;
    std::vector<std::uint8_t> bits;
    CVec equalized; // g^0
    IterationTrace trace;
};

/// D_n = sum_k alpha_k h_{k,n} v_{k,n}.
inline CVec equalizer_denominator(const Grid& channel, const PrecodingMatrix& v, std::span<const double> alpha) {
    if (channel.rows() != v.antennas() || channel.cols() != v.subcarriers() || alpha.size() != v.antennas())
        throw SizingError("equalizer denominator: dimension mismatch");
    CVec d(v.subcarriers());
    for (std::size_t k = 0; k < v.antennas(); ++k)
        for (std::size_t n = 0; n < d.size(); ++n)
            d[n] += alpha[k] * channel(k, n) * v(k, n);
    return d;
}

inline CVec equalizer_denominator(const ReceiverSideInfo& info) {
    return equalizer_denominator(info.channel, info.precoder, info.alpha);
}

inline constexpr double deep_fade_threshold = 1e-12;

inline CVec equalize(std::span<const cplx> r, std::span<const cplx> denominator) {
    if (r.size() != denominator.size())
        throw SizingError("equalize: spectrum and denominator lengths differ");
    CVec g(r.size());
    for (std::size_t n = 0; n < r.size(); ++n) {
        if (std::abs(denominator[n]) < deep_fade_threshold)
            throw DeepFadeError(n);
        g[n] = r[n] / denominator[n];
    }
    return g;
}

inline CVec equalize(std::span<const cplx> r, const ReceiverSideInfo& info) {
    info.validate();
    return equalize(r, equalizer_denominator(info));
}

/// Default step (a): per-subcarrier minimum-distance decision.
struct HardDecision {
    const Constellation* constellation;
    CVec operator()(std::span<const cplx> g, std::size_t /*iteration*/) const { return hard_detect(g, *constellation); }
};

/// Noiseless receiver-side replica of the whole MISO link for symbols s,
/// equalized by D: sum_k DFT{A(IDFT{s v_k})} h_k / D.
inline CVec regenerate_mcnc(std::span<const cplx> symbols, const ReceiverSideInfo& info, std::span<const cplx> denominator) {
    const Grid x = mcnc::apply(symbols, info.precoder);
    std::vector<CVec> frames(x.rows());
    for (std::size_t k = 0; k < x.rows(); ++k)
        frames[k] = soft_limit(ofdm_modulate(x.row(k), info.cfg), info.amplifier);
    const CVec r = propagate(frames, info.channel, info.cfg);
    return equalize(r, denominator);
}

/// Single-chain replica: DFT{A(IDFT{s})} / alpha.
inline CVec regenerate_cnc(std::span<const cplx> symbols, const CncSideInfo& info) {
    const CVec frame = soft_limit(ofdm_modulate(symbols, info.cfg), info.amplifier);
    CVec g = ofdm_demodulate(frame, info.cfg);
    for (auto& x : g)
        x /= info.alpha;
    return g;
}

namespace detail {

template <class Regenerate, class Decide>
Reception iterate(CVec g0, std::size_t iterations, const Constellation& constellation, Regenerate&& regenerate,
                  Decide&& decide) {
    Reception out;
    out.equalized = std::move(g0);
    const CVec& g0ref = out.equalized;
    CVec g = g0ref;
    out.trace.decisions.reserve(iterations + 1);
    for (std::size_t i = 0;; ++i) {
        CVec s = decide(std::span<const cplx>(g), i);
        if (i == iterations) {
            out.trace.decisions.push_back(s);
            out.symbols = std::move(s);
            break;
        }
        const CVec regenerated = regenerate(std::span<const cplx>(s));
        CVec q(g.size());
        CVec next(g.size());
        for (std::size_t n = 0; n < g.size(); ++n) {
            q[n] = regenerated[n] - s[n];
            next[n] = g0ref[n] - q[n];
        }
        out.trace.decisions.push_back(std::move(s));
        out.trace.distortion.push_back(std::move(q));
        out.trace.refined.push_back(next);
        g = std::move(next);
    }
    out.bits = constellation.demap(out.symbols);
    return out;
}

} // namespace detail

/// Zero-forcing equalization followed by hard detection.
inline Reception standard_receive(std::span<const cplx> r, const ReceiverSideInfo& info) {
    info.validate();
    return detail::iterate(
        equalize(r, info), 0, info.constellation, [](std::span<const cplx> s) { return CVec(s.begin(), s.end()); },
        HardDecision{&info.constellation});
}

/// Multi-antenna clipping noise cancellation. `decide` replaces the hard
/// decision of step (a); it receives (g^i, i).
template <class Decide>
Reception mcnc_receive(std::span<const cplx> r, const ReceiverSideInfo& info, int iterations, Decide&& decide) {
    if (iterations < 0)
        throw SizingError("iteration count must be non-negative");
    info.validate();
    const CVec d = equalizer_denominator(info);
    return detail::iterate(
        equalize(r, d), static_cast<std::size_t>(iterations), info.constellation,
        [&](std::span<const cplx> s) { return regenerate_mcnc(s, info, d); }, std::forward<Decide>(decide));
}

inline Reception mcnc_receive(std::span<const cplx> r, const ReceiverSideInfo& info, int iterations) {
    return mcnc_receive(r, info, iterations, HardDecision{&info.constellation});
}

/// CNC side info derived from the full side info: the same equalizer
/// denominator, the scalar alpha of the global back-off, and the limiter
/// rescaled to a single unprecoded chain.
inline CncSideInfo cnc_side_info(const ReceiverSideInfo& info, double ibo_db, double symbol_power) {
    info.validate();
    CncSideInfo lite;
    lite.denominator = equalizer_denominator(info);
    lite.alpha = info.amplifier.is_linear() ? 1.0 : alpha_analytic(ibo_db);
    lite.amplifier = info.amplifier.is_linear() ? AmplifierModel::linear()
                                                : AmplifierModel::from_ibo(ibo_db, reference_power(info.cfg, 1, symbol_power));
    lite.cfg = info.cfg;
    lite.constellation = info.constellation;
    return lite;
}

template <class Decide>
Reception cnc_receive(std::span<const cplx> r, const CncSideInfo& info, int iterations, Decide&& decide) {
    if (iterations < 0)
        throw SizingError("iteration count must be non-negative");
    if (!(info.alpha > 0.0))
        throw SizingError("CNC needs a positive Bussgang gain");
    return detail::iterate(
        equalize(r, info.denominator), static_cast<std::size_t>(iterations), info.constellation,
        [&](std::span<const cplx> s) { return regenerate_cnc(s, info); }, std::forward<Decide>(decide));
}

inline Reception cnc_receive(std::span<const cplx> r, const CncSideInfo& info, int iterations) {
    return cnc_receive(r, info, iterations, HardDecision{&info.constellation});
}

} // namespace mcnc
