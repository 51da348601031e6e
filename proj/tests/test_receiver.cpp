// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "mcnc/analysis.hpp"
#include "mcnc/receiver.hpp"

using namespace mcnc;

namespace {

struct Link {
    OfdmConfig cfg;
    Constellation qam{64};
    Grid h;
    PrecodingMatrix v;
    AmplifierModel amp;
    BussgangCoefficients bussgang;
    std::vector<std::uint8_t> bits;
    CVec s;
    CVec r; // noiseless
    ReceiverSideInfo info;
};

enum class Pre { mrt, phase_only };

Link make_link(std::size_t k, std::size_t n_fft, std::size_t n_used, double ibo_db, Pre pre, std::uint64_t seed,
               bool rayleigh_channel = true) {
    Link l;
    l.cfg = OfdmConfig::with_size(n_fft, n_used);
    RngStream rng(seed);
    if (rayleigh_channel) {
        l.h = rayleigh(k, n_used, rng).gains;
    } else {
        l.h = los(ArrayGeometry::half_wavelength(k, l.cfg.carrier_hz), ReceiverPlacement{}, l.cfg, rng).gains;
    }
    l.v = pre == Pre::mrt ? mrt(l.h) : phase_only_matrix(phase_only_from_channel(l.h, n_used / 2), n_used);
    l.amp = std::isinf(ibo_db) ? AmplifierModel::linear() : AmplifierModel::from_ibo(ibo_db, reference_power(l.cfg, k, 1.0));
    l.bussgang = per_antenna_ibo(l.v, l.amp, 1.0, l.cfg);
    l.bits.resize(n_used * l.qam.bits_per_symbol());
    for (auto& b : l.bits)
        b = rng.bit();
    l.s = l.qam.map(l.bits);
    const Grid x = mcnc::apply(l.s, l.v);
    std::vector<CVec> frames;
    for (std::size_t a = 0; a < k; ++a)
        frames.push_back(soft_limit(ofdm_modulate(x.row(a), l.cfg), l.amp));
    l.r = propagate(frames, l.h, l.cfg);
    l.info = ReceiverSideInfo{l.h, l.v, l.bussgang.alpha, l.amp, l.cfg, l.qam};
    return l;
}

} // namespace

TEST(Equalize, LinearMrtRecoversSymbols) {
    const Link l = make_link(8, 64, 32, INFINITY, Pre::mrt, 1);
    const CVec g = equalize(l.r, l.info);
    for (std::size_t n = 0; n < g.size(); ++n)
        EXPECT_LT(std::abs(g[n] - l.s[n]), 1e-10);
    EXPECT_EQ(standard_receive(l.r, l.info).bits, l.bits);
}

TEST(Equalize, ZeroInZeroOut) {
    const Link l = make_link(4, 32, 16, 0.0, Pre::mrt, 2);
    EXPECT_EQ(energy(equalize(CVec(16), l.info)), 0.0);
}

TEST(Equalize, ResidualDecomposition) {
    const Link l = make_link(1, 64, 32, 0.0, Pre::mrt, 3);
    const CVec d = equalizer_denominator(l.info);
    const CVec g = equalize(l.r, d);
    for (std::size_t n = 0; n < g.size(); ++n)
        EXPECT_LT(std::abs((g[n] - l.s[n]) - (l.r[n] - d[n] * l.s[n]) / d[n]), 1e-12);
}

TEST(Equalize, DeepFadeNamesSubcarrier) {
    const CVec d{{1.0, 0.0}, {1e-14, 0.0}, {1.0, 0.0}};
    try {
        equalize(CVec(3, 1.0), d);
        FAIL() << "expected DeepFadeError";
    } catch (const DeepFadeError& e) {
        EXPECT_EQ(e.subcarrier(), 1u);
    }
}

TEST(ZeroIterations, AllReceiversAgree) {
    const Link l = make_link(16, 128, 64, 0.0, Pre::mrt, 4);
    RngStream rng(40);
    const CVec r = add_awgn(l.r, 1e-3, rng);
    const Reception a = standard_receive(r, l.info);
    const Reception b = mcnc_receive(r, l.info, 0);
    const Reception c = cnc_receive(r, cnc_side_info(l.info, 0.0, 1.0), 0);
    EXPECT_EQ(a.bits, b.bits);
    EXPECT_EQ(a.bits, c.bits);
    EXPECT_EQ(a.symbols, b.symbols);
}

TEST(Mcnc, NegativeIterationsRejected) {
    const Link l = make_link(2, 32, 16, 0.0, Pre::mrt, 5);
    EXPECT_THROW(mcnc_receive(l.r, l.info, -1), SizingError);
    EXPECT_THROW(cnc_receive(l.r, cnc_side_info(l.info, 0.0, 1.0), -1), SizingError);
}

TEST(Mcnc, PerfectDecisionsCancelDistortion) {
    const Link l = make_link(4, 32, 16, 0.0, Pre::mrt, 6);
    const CVec truth = l.s;
    auto oracle_decide = [&](std::span<const cplx>, std::size_t) { return truth; };
    const Reception rx = mcnc_receive(l.r, l.info, 3, oracle_decide);
    ASSERT_EQ(rx.trace.refined.size(), 3u);
    // The clipping must actually matter for this to mean anything.
    double raw = 0.0;
    for (std::size_t n = 0; n < truth.size(); ++n)
        raw = std::max(raw, std::abs(rx.equalized[n] - truth[n]));
    EXPECT_GT(raw, 1e-3);
    for (const auto& g : rx.trace.refined)
        for (std::size_t n = 0; n < truth.size(); ++n)
            EXPECT_LT(std::abs(g[n] - truth[n]), 1e-9);
}

TEST(Mcnc, CleanHighSnrConvergesOnLos) {
    const Link l = make_link(64, 256, 128, 0.0, Pre::mrt, 7, false);
    const Reception rx = mcnc_receive(l.r, l.info, 8);
    const auto e0 = count_bit_errors(l.bits, l.qam.demap(rx.trace.decisions.front()));
    const auto e8 = count_bit_errors(l.bits, rx.bits);
    EXPECT_GT(e0, 0u);
    EXPECT_LE(e8, e0);
}

TEST(Cnc, EquivalentToMcncUnderPhaseOnlyPrecoding) {
    for (bool ray : {true, false})
        for (double ibo : {0.0, 3.0})
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const Link l = make_link(8, 64, 32, ibo, Pre::phase_only, 100 + seed, ray);
                RngStream rng(seed);
                const CVec r = add_awgn(l.r, 1e-4 * mean_power(equalizer_denominator(l.info)), rng);
                const Reception m = mcnc_receive(r, l.info, 4);
                const Reception c = cnc_receive(r, cnc_side_info(l.info, ibo, 1.0), 4);
                EXPECT_EQ(m.bits, c.bits);
                for (std::size_t i = 0; i < m.trace.refined.size(); ++i)
                    for (std::size_t n = 0; n < 32; ++n)
                        EXPECT_LT(std::abs(m.trace.refined[i][n] - c.trace.refined[i][n]), 1e-9);
            }
}

TEST(Cnc, SideInfoUsesSingleChainScaling) {
    const Link l = make_link(16, 256, 128, 2.0, Pre::mrt, 9);
    const CncSideInfo lite = cnc_side_info(l.info, 2.0, 1.0);
    EXPECT_DOUBLE_EQ(lite.amplifier.p_max, db_to_linear(2.0) * 128.0 / 256.0);
    EXPECT_DOUBLE_EQ(lite.alpha, alpha_analytic(2.0));
}
