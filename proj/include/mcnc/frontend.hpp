// SPDX-License-Identifier: Apache-2.0
#pragma once

// Soft-limiter power amplifier and its Bussgang gain.

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "mcnc/modem.hpp"
#include "mcnc/numerics.hpp"
#include "mcnc/precoding.hpp"

namespace mcnc {

/// Soft limiter shared by all K front-ends.
/// p_max = 10^{IBO/10} * reference_power.
struct AmplifierModel {
    double ibo_db = 0.0;
    double p_max = 1.0;
    double reference_power = 1.0;

    static AmplifierModel from_ibo(double ibo_db, double reference_power) {
        if (!(reference_power > 0.0))
            throw SizingError("amplifier reference power must be positive");
        return {ibo_db, db_to_linear(ibo_db) * reference_power, reference_power};
    }

    /// A limiter that never clips.
    static AmplifierModel linear(double reference_power = 1.0) {
        return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), reference_power};
    }

    bool is_linear() const noexcept { return std::isinf(p_max); }
};

/// Mean per-antenna sample power under normalized precoding: P_s N_U / (K N).
inline double reference_power(const OfdmConfig& cfg, std::size_t antennas, double symbol_power) {
    if (antennas == 0)
        throw SizingError("antenna count must be at least 1");
    return symbol_power * static_cast<double>(cfg.data_subcarriers) /
           (static_cast<double>(antennas) * static_cast<double>(cfg.fft_size));
}

inline cplx soft_limit(cplx y, double p_max) {
    const double p = std::norm(y);
    if (p <= p_max)
        return y;
    return y * (std::sqrt(p_max) / std::sqrt(p));
}

inline CVec soft_limit(std::span<const cplx> frame, const AmplifierModel& amp) {
    if (!(amp.p_max > 0.0))
        throw SizingError("saturation power must be positive");
    CVec out(frame.size());
    for (std::size_t t = 0; t < frame.size(); ++t)
        out[t] = soft_limit(frame[t], amp.p_max);
    return out;
}

/// Bussgang gain of a soft limiter driven by complex Gaussian input at the
/// given back-off: 1 - e^{-g^2} + (sqrt(pi) g / 2) erfc(g), g = 10^{IBO/20}.
inline double alpha_analytic(double ibo_db) {
    if (std::isinf(ibo_db) && ibo_db > 0)
        return 1.0;
    const double g = std::pow(10.0, ibo_db / 20.0);
    return 1.0 - std::exp(-g * g) + std::sqrt(std::numbers::pi) * g / 2.0 * std::erfc(g);
}

/// Accumulates sum(out * conj(in)) and sum(|in|^2) over any number of frames.
class BussgangEstimator {
  public:
    void add(std::span<const cplx> input, std::span<const cplx> output) {
        if (input.size() != output.size())
            throw SizingError("Bussgang estimator: input and output lengths differ");
        for (std::size_t t = 0; t < input.size(); ++t) {
            cross_ += output[t] * std::conj(input[t]);
            power_ += std::norm(input[t]);
        }
        samples_ += input.size();
    }

    std::size_t samples() const noexcept { return samples_; }

    double alpha() const {
        if (samples_ == 0)
            throw SizingError("Bussgang estimator: no samples");
        if (!(power_ > 0.0))
            throw NumericalError("Bussgang estimator: zero input power, ratio undefined");
        return cross_.real() / power_;
    }

  private:
    cplx cross_{};
    double power_ = 0.0;
    std::size_t samples_ = 0;
};

/// Sample form of the Bussgang gain E[out in*] / E[in in*]. The real part is
/// returned; the imaginary part vanishes for phase-preserving nonlinearities.
inline double alpha_empirical(std::span<const cplx> input, std::span<const cplx> output) {
    BussgangEstimator est;
    est.add(input, output);
    return est.alpha();
}

inline double alpha_empirical(std::span<const CVec> inputs, std::span<const CVec> outputs) {
    if (inputs.size() != outputs.size())
        throw SizingError("Bussgang estimator: frame counts differ");
    BussgangEstimator est;
    for (std::size_t i = 0; i < inputs.size(); ++i)
        est.add(inputs[i], outputs[i]);
    return est.alpha();
}

struct BussgangCoefficients {
    std::vector<double> alpha;
    std::vector<double> ibo_db;
    /// Antennas with zero precoding power; their alpha is pinned to 1.
    std::vector<bool> silent;

    double mean_alpha() const {
        double s = 0.0;
        for (double a : alpha)
            s += a;
        return alpha.empty() ? 0.0 : s / static_cast<double>(alpha.size());
    }
};

/// Per-antenna back-off from the precoder's power distribution and the
/// resulting analytic gains.
inline BussgangCoefficients per_antenna_ibo(const PrecodingMatrix& v, const AmplifierModel& amp, double symbol_power,
                                            const OfdmConfig& cfg) {
    BussgangCoefficients out;
    const std::size_t k_count = v.antennas();
    out.alpha.resize(k_count);
    out.ibo_db.resize(k_count);
    out.silent.assign(k_count, false);
    for (std::size_t k = 0; k < k_count; ++k) {
        const double mean_power = symbol_power / static_cast<double>(cfg.fft_size) * v.antenna_power(k);
        if (!(mean_power > 0.0)) {
            out.silent[k] = true;
            out.ibo_db[k] = std::numeric_limits<double>::infinity();
            out.alpha[k] = 1.0;
            continue;
        }
        out.ibo_db[k] = amp.is_linear() ? std::numeric_limits<double>::infinity() : linear_to_db(amp.p_max / mean_power);
        out.alpha[k] = alpha_analytic(out.ibo_db[k]);
    }
    return out;
}

} // namespace mcnc
