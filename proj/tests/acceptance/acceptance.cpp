// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. Tolerances and runtime budgets are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "mcnc/harness/sweep.hpp"
#include "mcnc/mcnc.hpp"
#include "oracles.hpp"

using namespace mcnc;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

unsigned worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const SweepRecord* find_row(const std::vector<SweepRecord>& rows, const std::string& receiver, int iterations,
                            double ebn0, double eps = -1.0) {
    for (const auto& r : rows)
        if (r.receiver == receiver && r.iterations == iterations && r.ebn0_db && *r.ebn0_db == ebn0 &&
            (eps < 0.0 || r.csi_eps == eps))
            return &r;
    return nullptr;
}

ScenarioConfig los_scenario() {
    ScenarioConfig c;
    c.ofdm = OfdmConfig::with_size(256, 128);
    c.qam = 64;
    c.antennas = {64};
    c.channels = {ChannelModel::los};
    c.ibo_db = {0.0};
    c.symbols = 200;
    c.seed = 2024;
    return c;
}

// 1 -------------------------------------------------------------------------
Outcome alpha_validation() {
    constexpr double tol = 3e-3;
    constexpr std::size_t samples = 1'000'000;
    RngStream rng(1, 1);
    CVec in(samples);
    for (auto& x : in)
        x = rng.gaussian(1.0);
    bool ok = true;
    std::string d;
    for (double ibo : {0.0, 2.0, 4.0, 6.0, 8.0}) {
        const CVec out = soft_limit(in, AmplifierModel::from_ibo(ibo, 1.0));
        const double emp = alpha_empirical(in, out);
        const double ana = alpha_analytic(ibo);
        ok &= std::abs(emp - ana) < tol;
        if (ibo == 0.0)
            ok &= std::abs(emp - 0.7716) <= 0.003;
        d += fmt("IBO %g: %.5f/%.5f ", ibo, emp, ana);
    }
    return {ok, d + "(empirical/analytic)"};
}

// 2 -------------------------------------------------------------------------
// K-invariance is checked at desk scale. The Rayleigh array gain is checked at
// N = 4096: with few subcarriers part of the clipping distortion stays
// coherent across antennas and the gain falls short of 10log10(K) (about
// 16.3 dB at N_U = 128), which is reported alongside.
Outcome sdr_geometry() {
    constexpr double invariance_tol = 0.5;
    constexpr double rayleigh_gain = 18.06, rayleigh_tol = 1.5;
    auto sdr_of = [](const std::vector<SweepRecord>& rows, ChannelModel ch, std::size_t k, double ibo) {
        for (const auto& r : rows)
            if (r.channel == ch && r.k == k && r.ibo_db == ibo)
                return *r.sdr_db;
        return std::numeric_limits<double>::quiet_NaN();
    };
    ScenarioConfig desk = los_scenario();
    desk.channels = {ChannelModel::los, ChannelModel::two_path, ChannelModel::rayleigh};
    desk.antennas = {1, 16, 64};
    desk.ibo_db = {0.0, 3.0, 6.0};
    desk.symbols = 1000;
    const auto rows = run_sdr_sweep(desk, {worker_threads()});

    ScenarioConfig full = desk;
    full.ofdm = OfdmConfig::with_size(4096, 2048);
    full.channels = {ChannelModel::rayleigh};
    full.antennas = {1, 64};
    full.symbols = 60;
    const auto big = run_sdr_sweep(full, {worker_threads()});

    bool ok = true;
    double worst_spread = 0.0;
    for (auto ch : {ChannelModel::los, ChannelModel::two_path})
        for (double ibo : desk.ibo_db) {
            const double a = sdr_of(rows, ch, 1, ibo), b = sdr_of(rows, ch, 16, ibo), e = sdr_of(rows, ch, 64, ibo);
            const double spread = std::max({a, b, e}) - std::min({a, b, e});
            worst_spread = std::max(worst_spread, spread);
            ok &= spread <= invariance_tol;
        }
    std::string d = fmt("LOS/two-path worst K-spread %.2f dB (N=256); Rayleigh K64-K1 at N=4096:", worst_spread);
    for (double ibo : desk.ibo_db) {
        const double gain = sdr_of(big, ChannelModel::rayleigh, 64, ibo) - sdr_of(big, ChannelModel::rayleigh, 1, ibo);
        ok &= std::abs(gain - rayleigh_gain) <= rayleigh_tol;
        d += fmt(" %.2f", gain);
    }
    d += " dB; at N=256 (info):";
    for (double ibo : desk.ibo_db)
        d += fmt(" %.2f", sdr_of(rows, ChannelModel::rayleigh, 64, ibo) - sdr_of(rows, ChannelModel::rayleigh, 1, ibo));
    return {ok, d + " dB"};
}

// 3 -------------------------------------------------------------------------
Outcome standard_floor() {
    ScenarioConfig c = los_scenario();
    c.ebn0_db = {15.0, 25.0};
    c.receivers = {ReceiverChoice::standard};
    c.iterations = {0};
    const auto rows = run_ber_sweep(c, {worker_threads()});
    bool ok = true;
    std::string d;
    for (double e : c.ebn0_db) {
        const double b = *find_row(rows, "standard", 0, e)->ber;
        ok &= b >= 0.05 && b <= 0.2;
        d += fmt("Eb/N0 %g dB: BER %.4f  ", e, b);
    }
    return {ok, d};
}

// 4 -------------------------------------------------------------------------
// Evaluated at N = 4096. At N = 256 about one OFDM symbol in 600 needs 9-16
// iterations instead of 8, and against a zero-error reference a single such
// symbol decides the outcome; the desk-scale count is reported alongside.
Outcome mcnc_convergence() {
    auto run = [](std::size_t n_fft, std::size_t symbols) {
        ScenarioConfig c = los_scenario();
        c.ofdm = OfdmConfig::with_size(n_fft, n_fft / 2);
        c.symbols = symbols;
        c.ebn0_db = {30.0};
        c.receivers = {ReceiverChoice::mcnc, ReceiverChoice::nodist};
        c.iterations = {0, 8};
        return run_ber_sweep(c, {worker_threads()});
    };
    const auto rows = run(4096, 200);
    const auto* m = find_row(rows, "mcnc", 8, 30.0);
    const auto* m0 = find_row(rows, "mcnc", 0, 30.0);
    const auto* l = find_row(rows, "nodist", 0, 30.0);
    const bool ok = *m->ber <= 2.0 * *l->ber;
    const auto desk = run(256, 200);
    const auto* dm = find_row(desk, "mcnc", 8, 30.0);
    const auto* dl = find_row(desk, "nodist", 0, 30.0);
    return {ok, fmt("30 dB, N=4096: MCNC I=8 %llu/%llu bit errors, linear PA %llu, I=0 BER %.4f; "
                    "N=256 (info): MCNC I=8 %llu/%llu, linear PA %llu",
                    (unsigned long long)*m->bit_errors, (unsigned long long)*m->total_bits,
                    (unsigned long long)*l->bit_errors, *m0->ber, (unsigned long long)*dm->bit_errors,
                    (unsigned long long)*dm->total_bits, (unsigned long long)*dl->bit_errors)};
}

// 5 -------------------------------------------------------------------------
/// Eb/N0 where BER first falls to `target`, interpolated in log BER.
double crossing(const std::vector<double>& ebn0, const std::vector<double>& ber, double target) {
    for (std::size_t i = 0; i < ebn0.size(); ++i) {
        if (ber[i] > target)
            continue;
        if (i == 0)
            return ebn0[0];
        const double lo = std::log10(std::max(ber[i - 1], 1e-12));
        const double hi = std::log10(std::max(ber[i], 1e-12));
        const double t = (lo - std::log10(target)) / (lo - hi);
        return ebn0[i - 1] + t * (ebn0[i] - ebn0[i - 1]);
    }
    return INFINITY;
}

Outcome cnc_gap() {
    constexpr double max_gap_db = 3.0;
    constexpr double target = 1e-3;
    ScenarioConfig c = los_scenario();
    c.ebn0_db.clear();
    for (double e = 14.0; e <= 30.0; e += 1.0)
        c.ebn0_db.push_back(e);
    c.receivers = {ReceiverChoice::cnc, ReceiverChoice::mcnc};
    c.iterations = {8};
    const auto rows = run_ber_sweep(c, {worker_threads()});
    std::vector<double> bm, bc;
    for (double e : c.ebn0_db) {
        bm.push_back(*find_row(rows, "mcnc", 8, e)->ber);
        bc.push_back(*find_row(rows, "cnc", 8, e)->ber);
    }
    const double em = crossing(c.ebn0_db, bm, target);
    const double ec = crossing(c.ebn0_db, bc, target);
    const bool ok = std::isfinite(em) && ec - em <= max_gap_db;
    return {ok, fmt("BER 1e-3 reached at MCNC %.2f dB, CNC %.2f dB, gap %.2f dB", em, ec, ec - em)};
}

// 6 -------------------------------------------------------------------------
Outcome cnc_rayleigh() {
    ScenarioConfig c = los_scenario();
    c.channels = {ChannelModel::rayleigh};
    c.ebn0_db = {15.0};
    c.receivers = {ReceiverChoice::cnc, ReceiverChoice::mcnc};
    c.iterations = {0, 3};
    const auto rows = run_ber_sweep(c, {worker_threads()});
    const double c0 = *find_row(rows, "cnc", 0, 15.0)->ber, c3 = *find_row(rows, "cnc", 3, 15.0)->ber;
    const double m0 = *find_row(rows, "mcnc", 0, 15.0)->ber, m3 = *find_row(rows, "mcnc", 3, 15.0)->ber;
    const bool ok = c3 >= c0 && m3 <= m0;
    return {ok, fmt("Eb/N0 15 dB: CNC %.4f -> %.4f, MCNC %.4f -> %.4f (I=0 -> I=3)", c0, c3, m0, m3)};
}

// 7 -------------------------------------------------------------------------
Outcome cnc_mcnc_equivalence() {
    constexpr std::size_t symbols = 100;
    constexpr int iterations = 4;
    ScenarioConfig c = los_scenario();
    c.precoder = PrecoderKind::phase_only;
    const Constellation qam(c.qam);
    std::size_t compared = 0, mismatched = 0;
    for (std::size_t k : {2u, 8u})
        for (auto ch : {ChannelModel::los, ChannelModel::rayleigh})
            for (double ibo : {0.0, 3.0}) {
                const ScenarioPoint p{ch, k, ibo, 0.0};
                for (std::size_t t = 0; t < symbols; ++t) {
                    RngStream rng(77, RngStream::stream_id(k * 100 + static_cast<std::size_t>(ch) * 10 + ibo, t));
                    const Transmission tx = transmit(c, p, qam, rng);
                    const ReceiverSideInfo info{tx.estimate.gains, tx.precoder, tx.bussgang.alpha, tx.amplifier, c.ofdm, qam};
                    const double n0 = noise_power_for_ebn0(tx.truth.gains, tx.precoder, tx.bussgang.alpha,
                                                           c.symbol_power, c.qam, 20.0);
                    const CVec r = add_awgn(tx.received, n0, rng);
                    const Reception m = mcnc_receive(r, info, iterations);
                    const Reception n = cnc_receive(r, cnc_side_info(info, ibo, c.symbol_power), iterations);
                    ++compared;
                    bool same = m.bits == n.bits;
                    for (std::size_t i = 0; i < m.trace.decisions.size(); ++i)
                        same &= m.trace.decisions[i] == n.trace.decisions[i];
                    mismatched += !same;
                }
            }
    return {mismatched == 0, fmt("%zu OFDM symbols over 8 (K, channel, IBO) cases, %zu with differing decisions",
                                 compared, mismatched)};
}

// 8 -------------------------------------------------------------------------
Outcome perfect_decisions() {
    constexpr double tol = 1e-9;
    ScenarioConfig c = los_scenario();
    c.ofdm = OfdmConfig::with_size(32, 16);
    const Constellation qam(c.qam);
    double worst = 0.0, raw = 0.0;
    for (auto ch : {ChannelModel::los, ChannelModel::rayleigh}) {
        RngStream rng(8, static_cast<std::uint64_t>(ch));
        const Transmission tx = transmit(c, {ch, 4, 0.0, 0.0}, qam, rng);
        const ReceiverSideInfo info{tx.truth.gains, tx.precoder, tx.bussgang.alpha, tx.amplifier, c.ofdm, qam};
        const CVec truth = tx.symbols;
        const Reception rx = mcnc_receive(tx.received, info, 3, [&](std::span<const cplx>, std::size_t) { return truth; });
        for (std::size_t n = 0; n < truth.size(); ++n)
            raw = std::max(raw, std::abs(rx.equalized[n] - truth[n]));
        for (const auto& g : rx.trace.refined)
            for (std::size_t n = 0; n < truth.size(); ++n)
                worst = std::max(worst, std::abs(g[n] - truth[n]));
    }
    return {worst < tol, fmt("max |g - s| after cancellation %.2e (before %.2e)", worst, raw)};
}

// 9 -------------------------------------------------------------------------
Outcome complexity_tables() {
    constexpr double adds_tol = 0.01;
    struct Row {
        ReceiverKind kind;
        std::size_t it;
        double adds_k, mults_k;
    };
    const Row table[] = {{ReceiverKind::standard, 0, 0.16, 0.07}, {ReceiverKind::cnc, 1, 0.57, 0.19},
                         {ReceiverKind::cnc, 3, 1.38, 0.42},      {ReceiverKind::cnc, 8, 3.41, 1.00},
                         {ReceiverKind::mcnc, 1, 16.84, 3.47},    {ReceiverKind::mcnc, 3, 50.19, 10.27},
                         {ReceiverKind::mcnc, 8, 133.56, 27.26}};
    bool ok = true;
    double worst_adds = 0.0;
    int exact = 0;
    for (const auto& r : table) {
        const auto n = complexity(r.kind, {64, 4096, 2048, 64, r.it});
        const double mults = std::round(n.multiplications_per_subcarrier / 10.0) / 100.0;
        exact += mults == r.mults_k;
        const double rel = std::abs(n.additions_per_subcarrier / 1000.0 / r.adds_k - 1.0);
        worst_adds = std::max(worst_adds, rel);
    }
    // I=0 of the iterative receivers equals the standard row.
    for (auto kind : {ReceiverKind::cnc, ReceiverKind::mcnc}) {
        const auto n = complexity(kind, {64, 4096, 2048, 64, 0});
        exact += std::round(n.multiplications_per_subcarrier / 10.0) / 100.0 == 0.07;
    }
    ok = exact == 9 && worst_adds <= adds_tol;
    return {ok, fmt("%d/9 mult/div entries exact, worst adds deviation %.2f%%", exact, 100.0 * worst_adds)};
}

// 10 ------------------------------------------------------------------------
Outcome csi_robustness() {
    constexpr double lo = 1e-2, hi = 1e-1;
    constexpr double no_gain_ratio = 0.9;
    ScenarioConfig c = los_scenario();
    c.ebn0_db = {10.0, 12.0, 14.0, 16.0, 18.0, 20.0, 25.0, 30.0};
    c.csi_eps = {0.3, 1.0};
    c.receivers = {ReceiverChoice::mcnc};
    c.iterations = {5};
    const auto rows = run_ber_sweep(c, {worker_threads()});
    bool ok = true;
    int gain_points = 0;
    std::string d = "eps 0.3:";
    for (double e : c.ebn0_db) {
        const auto* r = find_row(rows, "mcnc", 5, e, 0.3);
        if (*r->ber_in >= lo && *r->ber_in <= hi) {
            ++gain_points;
            ok &= *r->ber < *r->ber_in;
            d += fmt(" [%g dB %.3f->%.3f]", e, *r->ber_in, *r->ber);
        }
    }
    ok &= gain_points > 0;
    d += " eps 1.0:";
    for (double e : c.ebn0_db) {
        const auto* r = find_row(rows, "mcnc", 5, e, 1.0);
        ok &= !(*r->ber < no_gain_ratio * *r->ber_in);
        if (e == c.ebn0_db.front() || e == c.ebn0_db.back())
            d += fmt(" [%g dB %.3f->%.3f]", e, *r->ber_in, *r->ber);
    }
    return {ok, d};
}

// 11 ------------------------------------------------------------------------
Outcome numerics_properties() {
    RngStream rng(11);
    auto random_vec = [&](std::size_t n) {
        CVec v(n);
        for (auto& x : v)
            x = rng.gaussian(1.0);
        return v;
    };
    double parseval = 0.0, roundtrip = 0.0, naive = 0.0;
    for (std::size_t n = 2; n <= 4096; n <<= 1) {
        const CVec v = random_vec(n);
        const CVec f = dft(v, Direction::forward);
        parseval = std::max(parseval, std::abs(energy(f) / energy(v) - 1.0));
        const CVec b = dft(f, Direction::inverse);
        for (std::size_t i = 0; i < n; ++i)
            roundtrip = std::max(roundtrip, std::abs(b[i] - v[i]));
        if (n <= 256) {
            const auto o = oracle::naive_dft(v, -1);
            for (std::size_t i = 0; i < n; ++i)
                naive = std::max(naive, std::abs(o[i] - f[i]));
        }
    }
    // Bussgang orthogonality: distortion uncorrelated with the input.
    const CVec in = random_vec(1'000'000);
    const CVec out = soft_limit(in, AmplifierModel::from_ibo(0.0, 1.0));
    const double a = alpha_empirical(in, out);
    cplx cross{};
    for (std::size_t i = 0; i < in.size(); ++i)
        cross += (out[i] - a * in[i]) * std::conj(in[i]);
    const double ortho = std::abs(cross) / energy(in);
    // Precoder normalization, MRT and phase-only.
    const auto h = rayleigh(16, 128, rng);
    double norm_err = 0.0;
    for (const auto& v : {mrt(h.gains), phase_only_matrix(phase_only_from_channel(h.gains, 64), 128)})
        for (std::size_t n = 0; n < 128; ++n) {
            double p = 0.0;
            for (std::size_t k = 0; k < 16; ++k)
                p += std::norm(v(k, n));
            norm_err = std::max(norm_err, std::abs(p - 1.0));
        }
    // Soft-limiter idempotence.
    const CVec twice = soft_limit(out, AmplifierModel::from_ibo(0.0, 1.0));
    double idem = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i)
        idem = std::max(idem, std::abs(twice[i] - out[i]));
    const bool ok = parseval < 1e-10 && roundtrip < 1e-10 && naive < 1e-10 && ortho < 1e-3 && norm_err < 1e-12 &&
                    idem < 1e-15;
    return {ok, fmt("parseval %.1e, round-trip %.1e, naive %.1e, orthogonality %.1e, normalization %.1e, "
                    "idempotence %.1e",
                    parseval, roundtrip, naive, ortho, norm_err, idem)};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "alpha validation", 10, alpha_validation},
        {2, "SDR geometry", 120, sdr_geometry},
        {3, "standard receiver distortion floor", 120, standard_floor},
        {4, "MCNC reaches linear-PA BER", 300, mcnc_convergence},
        {5, "CNC vs MCNC gap", 600, cnc_gap},
        {6, "CNC fails on Rayleigh, MCNC does not", 300, cnc_rayleigh},
        {7, "CNC equals MCNC under phase-only precoding", 60, cnc_mcnc_equivalence},
        {8, "perfect-decision cancellation", 1, perfect_decisions},
        {9, "complexity tables", 1, complexity_tables},
        {10, "CSI-error robustness", 600, csi_robustness},
        {11, "numerics properties", 30, numerics_properties},
    };
    // Optional arguments select criteria by number.
    std::vector<int> only;
    for (int i = 1; i < argc; ++i)
        only.push_back(std::atoi(argv[i]));
    int failed = 0, ran = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end())
            continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = dt <= c.budget_s;
        const bool pass = o.pass && in_budget;
        failed += !pass;
        std::printf("%s  %2d %-44s %7.2fs/%gs%s  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, dt, c.budget_s,
                    in_budget ? "" : " OVER BUDGET", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
