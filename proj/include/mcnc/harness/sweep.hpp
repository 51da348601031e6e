// SPDX-License-Identifier: Apache-2.0
#pragma once

// Monte Carlo campaigns. Each scenario point (channel, K, IBO, CSI error)
// runs `symbols` independent trials; trial t of point p draws from its own
// RngStream keyed by (seed, p, t), so results do not depend on how trials are
// spread over threads. Per-trial results are merged in trial order.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mcnc/analysis.hpp"
#include "mcnc/channel.hpp"
#include "mcnc/frontend.hpp"
#include "mcnc/harness/config.hpp"
#include "mcnc/modem.hpp"
#include "mcnc/precoding.hpp"
#include "mcnc/receiver.hpp"

namespace mcnc {

struct SweepRecord {
    std::string sweep;
    // scenario coordinates
    std::size_t fft_size = 0;
    std::size_t data_subcarriers = 0;
    unsigned qam = 0;
    PrecoderKind precoder = PrecoderKind::mrt;
    double csi_eps = 0.0;
    std::size_t symbols = 0;
    std::uint64_t seed = 0;
    // per-antenna columns (alpha-check only)
    std::optional<std::size_t> antenna;
    std::optional<double> ibo_k_db;
    std::optional<double> alpha_analytic;
    std::optional<double> alpha_empirical;
    // standard-receiver BER at the same point
    std::optional<double> ber_in;
    // measurement
    std::string receiver;
    std::optional<int> iterations;
    std::optional<double> ebn0_db;
    double ibo_db = 0.0;
    std::size_t k = 0;
    ChannelModel channel = ChannelModel::los;
    std::optional<double> ber;
    std::optional<std::uint64_t> bit_errors;
    std::optional<std::uint64_t> total_bits;
    std::optional<double> sdr_db;
    std::optional<double> alpha_mean;
    double wall_time_s = 0.0;
};

struct RunOptions {
    unsigned threads = 1;
};

struct ScenarioPoint {
    ChannelModel channel;
    std::size_t antennas;
    double ibo_db;
    double csi_eps;
};

/// Points in the fixed order channel > antennas > IBO > CSI error.
inline std::vector<ScenarioPoint> scenario_points(const ScenarioConfig& c) {
    std::vector<ScenarioPoint> pts;
    for (auto ch : c.channels)
        for (auto k : c.antennas)
            for (double ibo : c.ibo_db)
                for (double eps : c.csi_eps)
                    pts.push_back({ch, k, ibo, eps});
    return pts;
}

/// One transmitted OFDM symbol and everything derived from it.
struct Transmission {
    ChannelRealization truth;
    ChannelRealization estimate;
    PrecodingMatrix precoder;
    AmplifierModel amplifier;
    BussgangCoefficients bussgang;
    std::vector<std::uint8_t> bits;
    CVec symbols;
    std::vector<CVec> clean;   // per-antenna frames before the amplifier
    std::vector<CVec> clipped; // after the amplifier
    CVec received;             // noiseless, through the true channel
};

inline ChannelRealization draw_channel(const ScenarioConfig& c, const ScenarioPoint& p, RngStream& rng) {
    switch (p.channel) {
    case ChannelModel::los:
        return los(c.geometry(p.antennas), c.placement(), c.ofdm, rng);
    case ChannelModel::two_path:
        return two_path(c.geometry(p.antennas), c.placement(), c.ofdm, rng, c.reflection);
    case ChannelModel::rayleigh:
        return rayleigh(p.antennas, c.ofdm.data_subcarriers, rng);
    }
    throw SizingError("unknown channel model");
}

inline PrecodingMatrix build_precoder(const ScenarioConfig& c, const Grid& estimate) {
    if (c.precoder == PrecoderKind::mrt)
        return mrt(estimate);
    return phase_only_matrix(phase_only_from_channel(estimate, c.ofdm.data_subcarriers / 2), c.ofdm.data_subcarriers);
}

/// TX chain: channel draw, CSI corruption, precoding, OFDM, amplifier, propagation.
inline Transmission transmit(const ScenarioConfig& c, const ScenarioPoint& p, const Constellation& constellation,
                             RngStream& rng) {
    Transmission tx;
    tx.truth = draw_channel(c, p, rng);
    tx.estimate = corrupt_csi(tx.truth, p.csi_eps, rng);
    tx.precoder = build_precoder(c, tx.estimate.gains);
    tx.amplifier = std::isinf(p.ibo_db) ? AmplifierModel::linear(reference_power(c.ofdm, p.antennas, c.symbol_power))
                                        : AmplifierModel::from_ibo(p.ibo_db, reference_power(c.ofdm, p.antennas, c.symbol_power));
    tx.bussgang = per_antenna_ibo(tx.precoder, tx.amplifier, c.symbol_power, c.ofdm);

    tx.bits.resize(c.ofdm.data_subcarriers * constellation.bits_per_symbol());
    for (auto& b : tx.bits)
        b = rng.bit();
    tx.symbols = constellation.map(tx.bits);

    const Grid x = mcnc::apply(tx.symbols, tx.precoder);
    tx.clean.resize(p.antennas);
    tx.clipped.resize(p.antennas);
    for (std::size_t k = 0; k < p.antennas; ++k) {
        tx.clean[k] = ofdm_modulate(x.row(k), c.ofdm);
        tx.clipped[k] = soft_limit(tx.clean[k], tx.amplifier);
    }
    tx.received = propagate(tx.clipped, tx.truth, c.ofdm);
    return tx;
}

namespace detail {

/// Run fn(trial) for trial in [0, count) on up to `threads` workers. Each
/// worker takes a contiguous block; results are written by trial index.
template <class Fn>
void for_each_trial(std::size_t count, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads == 1) {
        for (std::size_t t = 0; t < count; ++t)
            fn(t);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    const std::size_t block = (count + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t lo = w * block;
                const std::size_t hi = std::min(count, lo + block);
                for (std::size_t t = lo; t < hi; ++t)
                    fn(t);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

inline SweepRecord base_record(const ScenarioConfig& c, const std::string& sweep, const ScenarioPoint& p) {
    SweepRecord r;
    r.sweep = sweep;
    r.fft_size = c.ofdm.fft_size;
    r.data_subcarriers = c.ofdm.data_subcarriers;
    r.qam = c.qam;
    r.precoder = c.precoder;
    r.csi_eps = p.csi_eps;
    r.symbols = c.symbols;
    r.seed = c.seed;
    r.ibo_db = p.ibo_db;
    r.k = p.antennas;
    r.channel = p.channel;
    return r;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

/// BER for every requested receiver and iteration count. The iterative
/// receivers run once with the largest iteration count; the decision after
/// i iterations is read from the trace. `nodist` is the same link with a
/// linear amplifier and a standard receiver.
inline std::vector<SweepRecord> run_ber_sweep(const ScenarioConfig& c, RunOptions opt = {},
                                              const std::string& label = "ber-sweep") {
    c.validate();
    const Constellation constellation(c.qam);
    const auto points = scenario_points(c);
    const int max_it = c.max_iterations();
    const std::size_t n_e = c.ebn0_db.size();
    const std::size_t n_i = c.iterations.size();
    const std::size_t n_r = c.receivers.size();
    const bool want_cnc = std::ranges::find(c.receivers, ReceiverChoice::cnc) != c.receivers.end();
    const bool want_mcnc = std::ranges::find(c.receivers, ReceiverChoice::mcnc) != c.receivers.end();
    const bool want_nodist = std::ranges::find(c.receivers, ReceiverChoice::nodist) != c.receivers.end();

    std::vector<SweepRecord> rows;
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const auto& p = points[pi];
        const auto t0 = std::chrono::steady_clock::now();

        struct TrialResult {
            // [ebn0][receiver][iteration]
            std::vector<std::uint64_t> errors;
            std::vector<std::uint64_t> standard_errors; // [ebn0]
            SdrTerms sdr;
            double alpha_mean = 0.0;
        };
        std::vector<TrialResult> results(c.symbols);

        detail::for_each_trial(c.symbols, opt.threads, [&](std::size_t trial) {
            RngStream rng(c.seed, RngStream::stream_id(pi, trial));
            const Transmission tx = transmit(c, p, constellation, rng);
            TrialResult& res = results[trial];
            res.errors.assign(n_e * n_r * n_i, 0);
            res.standard_errors.assign(n_e, 0);
            res.alpha_mean = tx.bussgang.mean_alpha();
            res.sdr = sdr_terms(tx.truth.gains, tx.precoder, tx.bussgang.alpha,
                                distortion_spectra(tx.clean, tx.clipped, tx.bussgang.alpha, c.ofdm), c.symbol_power);

            ReceiverSideInfo info{tx.estimate.gains, tx.precoder, tx.bussgang.alpha, tx.amplifier, c.ofdm, constellation};
            const CncSideInfo lite = cnc_side_info(info, p.ibo_db, c.symbol_power);

            CVec linear_rx;
            ReceiverSideInfo linear_info;
            double linear_noise_unit = 0.0;
            if (want_nodist) {
                linear_rx = propagate(tx.clean, tx.truth, c.ofdm);
                const std::vector<double> ones(p.antennas, 1.0);
                linear_info = ReceiverSideInfo{tx.estimate.gains, tx.precoder, ones, AmplifierModel::linear(), c.ofdm,
                                               constellation};
                linear_noise_unit = coherent_gain_power(tx.truth.gains, tx.precoder, ones);
            }
            const double noise_unit = coherent_gain_power(tx.truth.gains, tx.precoder, tx.bussgang.alpha);

            for (std::size_t ei = 0; ei < n_e; ++ei) {
                const double ebn0 = c.ebn0_db[ei];
                CVec w(c.ofdm.data_subcarriers);
                for (auto& x : w)
                    x = rng.gaussian(1.0);
                const double snr = std::isinf(ebn0) ? std::numeric_limits<double>::infinity()
                                                    : db_to_linear(snr_from_ebn0_db(ebn0, c.qam));
                const double sigma = std::isinf(snr) ? 0.0 : std::sqrt(c.symbol_power * noise_unit / snr);
                CVec r = tx.received;
                for (std::size_t n = 0; n < r.size(); ++n)
                    r[n] += sigma * w[n];

                std::optional<Reception> mc, cn;
                if (want_mcnc)
                    mc = mcnc_receive(r, info, max_it);
                if (want_cnc)
                    cn = cnc_receive(r, lite, max_it);
                const CVec& first = mc ? mc->trace.decisions.front()
                                       : cn ? cn->trace.decisions.front() : standard_receive(r, info).symbols;
                const auto std_errors = count_bit_errors(tx.bits, constellation.demap(first));
                res.standard_errors[ei] = std_errors;

                for (std::size_t ri = 0; ri < n_r; ++ri) {
                    for (std::size_t ii = 0; ii < n_i; ++ii) {
                        const auto it = static_cast<std::size_t>(c.iterations[ii]);
                        std::uint64_t e = 0;
                        switch (c.receivers[ri]) {
                        case ReceiverChoice::standard:
                            e = std_errors;
                            break;
                        case ReceiverChoice::mcnc:
                            e = count_bit_errors(tx.bits, constellation.demap(mc->trace.decisions[it]));
                            break;
                        case ReceiverChoice::cnc:
                            e = count_bit_errors(tx.bits, constellation.demap(cn->trace.decisions[it]));
                            break;
                        case ReceiverChoice::nodist: {
                            if (ii != 0)
                                break;
                            const double ls =
                                std::isinf(snr) ? 0.0 : std::sqrt(c.symbol_power * linear_noise_unit / snr);
                            CVec rl = linear_rx;
                            for (std::size_t n = 0; n < rl.size(); ++n)
                                rl[n] += ls * w[n];
                            e = count_bit_errors(tx.bits, standard_receive(rl, linear_info).bits);
                            break;
                        }
                        }
                        res.errors[(ei * n_r + ri) * n_i + ii] = e;
                    }
                }
            }
        });

        std::vector<std::uint64_t> errors(n_e * n_r * n_i, 0);
        std::vector<std::uint64_t> standard_errors(n_e, 0);
        SdrTerms sdr;
        double alpha_sum = 0.0;
        for (const auto& r : results) {
            for (std::size_t i = 0; i < errors.size(); ++i)
                errors[i] += r.errors[i];
            for (std::size_t i = 0; i < n_e; ++i)
                standard_errors[i] += r.standard_errors[i];
            sdr += r.sdr;
            alpha_sum += r.alpha_mean;
        }
        const std::uint64_t total = static_cast<std::uint64_t>(c.symbols) * c.ofdm.data_subcarriers *
                                    constellation.bits_per_symbol();
        const double wall = detail::seconds_since(t0);

        for (std::size_t ei = 0; ei < n_e; ++ei) {
            for (std::size_t ri = 0; ri < n_r; ++ri) {
                for (std::size_t ii = 0; ii < n_i; ++ii) {
                    if (c.receivers[ri] == ReceiverChoice::nodist && ii != 0)
                        continue;
                    SweepRecord rec = detail::base_record(c, label, p);
                    rec.ber_in = static_cast<double>(standard_errors[ei]) / static_cast<double>(total);
                    rec.receiver = std::string(to_string(c.receivers[ri]));
                    rec.iterations = c.receivers[ri] == ReceiverChoice::nodist || c.receivers[ri] == ReceiverChoice::standard
                                         ? 0
                                         : c.iterations[ii];
                    rec.ebn0_db = c.ebn0_db[ei];
                    rec.bit_errors = errors[(ei * n_r + ri) * n_i + ii];
                    rec.total_bits = total;
                    rec.ber = static_cast<double>(*rec.bit_errors) / static_cast<double>(total);
                    rec.sdr_db = sdr.db();
                    rec.alpha_mean = alpha_sum / static_cast<double>(c.symbols);
                    rec.wall_time_s = wall;
                    rows.push_back(std::move(rec));
                    if (c.receivers[ri] == ReceiverChoice::standard)
                        break; // iteration count is meaningless for the standard receiver
                }
            }
        }
    }
    return rows;
}

/// Same campaign as run_ber_sweep, labelled for BER-out vs BER-in plots
/// (the ber_in column carries the standard-receiver BER).
inline std::vector<SweepRecord> run_berin_berout(const ScenarioConfig& c, RunOptions opt = {}) {
    return run_ber_sweep(c, opt, "berin-berout");
}

/// BER against the iteration count.
inline std::vector<SweepRecord> run_convergence(const ScenarioConfig& c, RunOptions opt = {}) {
    return run_ber_sweep(c, opt, "convergence");
}

/// Signal-to-distortion ratio per scenario point.
inline std::vector<SweepRecord> run_sdr_sweep(const ScenarioConfig& c, RunOptions opt = {}) {
    c.validate();
    const Constellation constellation(c.qam);
    const auto points = scenario_points(c);
    std::vector<SweepRecord> rows;
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const auto& p = points[pi];
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<SdrTerms> terms(c.symbols);
        std::vector<double> alphas(c.symbols);
        detail::for_each_trial(c.symbols, opt.threads, [&](std::size_t trial) {
            RngStream rng(c.seed, RngStream::stream_id(pi, trial));
            const Transmission tx = transmit(c, p, constellation, rng);
            terms[trial] = sdr_terms(tx.truth.gains, tx.precoder, tx.bussgang.alpha,
                                     distortion_spectra(tx.clean, tx.clipped, tx.bussgang.alpha, c.ofdm), c.symbol_power);
            alphas[trial] = tx.bussgang.mean_alpha();
        });
        SdrTerms sum;
        double alpha_sum = 0.0;
        for (std::size_t t = 0; t < c.symbols; ++t) {
            sum += terms[t];
            alpha_sum += alphas[t];
        }
        SweepRecord rec = detail::base_record(c, "sdr-sweep", p);
        rec.sdr_db = sum.db();
        rec.alpha_mean = alpha_sum / static_cast<double>(c.symbols);
        rec.wall_time_s = detail::seconds_since(t0);
        rows.push_back(std::move(rec));
    }
    return rows;
}

/// Per-antenna back-off and Bussgang gain: empirical estimate from the
/// clipped frames against the analytic value at that antenna's back-off.
/// IBO_k uses the precoder power averaged over all trials.
inline std::vector<SweepRecord> run_alpha_check(const ScenarioConfig& c, RunOptions opt = {}) {
    c.validate();
    const Constellation constellation(c.qam);
    const auto points = scenario_points(c);
    std::vector<SweepRecord> rows;
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const auto& p = points[pi];
        const auto t0 = std::chrono::steady_clock::now();
        struct PerAntenna {
            std::vector<cplx> cross;
            std::vector<double> power;
            std::vector<double> precoder_power;
        };
        std::vector<PerAntenna> per(c.symbols);
        AmplifierModel amp;
        detail::for_each_trial(c.symbols, opt.threads, [&](std::size_t trial) {
            RngStream rng(c.seed, RngStream::stream_id(pi, trial));
            const Transmission tx = transmit(c, p, constellation, rng);
            auto& a = per[trial];
            a.cross.assign(p.antennas, {});
            a.power.assign(p.antennas, 0.0);
            a.precoder_power.assign(p.antennas, 0.0);
            for (std::size_t k = 0; k < p.antennas; ++k) {
                for (std::size_t t = 0; t < tx.clean[k].size(); ++t) {
                    a.cross[k] += tx.clipped[k][t] * std::conj(tx.clean[k][t]);
                    a.power[k] += std::norm(tx.clean[k][t]);
                }
                a.precoder_power[k] = tx.precoder.antenna_power(k);
            }
        });
        amp = std::isinf(p.ibo_db) ? AmplifierModel::linear() : AmplifierModel::from_ibo(p.ibo_db, reference_power(c.ofdm, p.antennas, c.symbol_power));
        const double wall = detail::seconds_since(t0);
        for (std::size_t k = 0; k < p.antennas; ++k) {
            cplx cross{};
            double power = 0.0, vpow = 0.0;
            for (const auto& a : per) {
                cross += a.cross[k];
                power += a.power[k];
                vpow += a.precoder_power[k];
            }
            vpow /= static_cast<double>(c.symbols);
            const double mean_power = c.symbol_power / static_cast<double>(c.ofdm.fft_size) * vpow;
            SweepRecord rec = detail::base_record(c, "alpha-check", p);
            rec.antenna = k;
            rec.ibo_k_db = amp.is_linear() || !(mean_power > 0.0) ? std::numeric_limits<double>::infinity()
                                                                   : linear_to_db(amp.p_max / mean_power);
            rec.alpha_analytic = alpha_analytic(*rec.ibo_k_db);
            rec.alpha_empirical = power > 0.0 ? cross.real() / power : 1.0;
            rec.alpha_mean = rec.alpha_empirical;
            rec.wall_time_s = wall;
            rows.push_back(std::move(rec));
        }
    }
    return rows;
}

struct ComplexityRow {
    ReceiverKind kind;
    ComplexityParams params;
    OperationCount count;
};

/// Operation counts for every receiver kind and requested iteration count.
inline std::vector<ComplexityRow> complexity_report(const ScenarioConfig& c) {
    c.validate();
    std::vector<ComplexityRow> rows;
    for (auto kind : {ReceiverKind::standard, ReceiverKind::cnc, ReceiverKind::mcnc}) {
        for (int it : c.complexity_iterations) {
            if (kind == ReceiverKind::standard && it != c.complexity_iterations.front())
                continue;
            ComplexityParams p{c.complexity_qam, c.complexity_fft_size, c.complexity_data_subcarriers,
                               c.complexity_antennas, kind == ReceiverKind::standard ? 0u : static_cast<std::size_t>(it)};
            rows.push_back({kind, p, complexity(kind, p)});
        }
    }
    return rows;
}

} // namespace mcnc
