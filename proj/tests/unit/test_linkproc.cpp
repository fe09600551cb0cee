// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#include "oracles.hpp"

#include "portlink/error.hpp"
#include "portlink/linkproc.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

using namespace portlink;
using namespace portlink::linkproc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    constexpr double bw = 10e6;

    LinkBudget at_snr_db(double snr_db)
    {
        return LinkBudget{bw, std::pow(10.0, snr_db / 10.0), 1.0};
    }

    ChannelMatrix iid(oracle::Rng &rng, Eigen::Index rows = 2, Eigen::Index cols = 16)
    {
        CMatrix h(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                h(i, j) = rng.cn();
        return ChannelMatrix(h, 3.16e9);
    }

    double sum(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0); }
}

TEST_CASE("1x1 maximal-ratio transmission")
{
    CMatrix h = CMatrix::Zero(1, 4);
    h(0, 0) = 0.6;
    h(0, 3) = cdouble(0, 0.8);
    const auto r = rate_miso_1x1(ChannelMatrix(h, 1e9), LinkBudget{bw, 1.0, 1.0});
    CHECK_THAT(r.rate, WithinRel(1e7, 1e-15));
    CHECK(r.scheme == Scheme::Miso1x1);

    CHECK(rate_miso_1x1(ChannelMatrix(h, 1e9), LinkBudget{bw, 1e-300, 1.0}).rate < 1e-290);

    const auto zero = rate_miso_1x1(ChannelMatrix(CMatrix::Zero(1, 4), 1e9), LinkBudget{bw, 1.0, 1.0});
    CHECK(zero.rate == 0.0);
    CHECK(zero.zero_channel);

    oracle::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial)
    {
        const auto ch = iid(rng, 1, 16);
        const double rho = rng.uniform(0.01, 100.0);
        CHECK_THAT(rate_miso_1x1(ch, LinkBudget{bw, rho, 1.0}).rate,
                   WithinRel(oracle::explicit_mrc_rate(ch.entries(), 0, bw, rho), 1e-12));
    }
    CHECK_THROWS_AS(rate_miso_1x1(iid(rng), LinkBudget{bw, 1.0, 1.0}), LinkError);
}

TEST_CASE("2x1 maximal-ratio combining")
{
    oracle::Rng rng(12);
    const LinkBudget lb{bw, 2.0, 0.5};
    SECTION("silent second antenna reduces to 1x1")
    {
        CMatrix h = iid(rng).entries();
        h.row(1).setZero();
        CHECK(rate_mrc_2x1(ChannelMatrix(h, 1e9), BeamTarget::Row1, lb).rate ==
              rate_miso_1x1(ChannelMatrix(h.topRows(1), 1e9), lb).rate);
    }
    SECTION("duplicated row doubles the SNR")
    {
        CMatrix h = iid(rng).entries();
        h.row(1) = h.row(0);
        const double g = h.row(0).squaredNorm();
        CHECK_THAT(rate_mrc_2x1(ChannelMatrix(h, 1e9), BeamTarget::Row1, lb).rate,
                   WithinRel(bw * std::log2(1.0 + 2.0 * g * lb.snr()), 1e-12));
    }
    SECTION("explicit two-observation oracle")
    {
        for (int trial = 0; trial < 200; ++trial)
        {
            const auto ch = iid(rng);
            const double rho = rng.uniform(0.01, 100.0);
            const LinkBudget b{bw, rho, 1.0};
            CHECK_THAT(rate_mrc_2x1(ch, BeamTarget::Row1, b).rate,
                       WithinRel(oracle::explicit_mrc_rate(ch.entries(), 0, bw, rho), 1e-12));
            CHECK_THAT(rate_mrc_2x1(ch, BeamTarget::Row2, b).rate,
                       WithinRel(oracle::explicit_mrc_rate(ch.entries(), 1, bw, rho), 1e-12));
        }
    }
    SECTION("zero target row")
    {
        CMatrix h = iid(rng).entries();
        h.row(1).setZero();
        CHECK_THROWS_AS(rate_mrc_2x1(ChannelMatrix(h, 1e9), BeamTarget::Row2, lb), LinkError);
        CHECK_THROWS_AS(rate_mrc_2x1(iid(rng, 1, 4), BeamTarget::Row2, lb), LinkError);
    }
}

TEST_CASE("LMMSE equalization")
{
    SECTION("orthogonal beams decouple at high SNR")
    {
        // Orthonormal rows give G = I / sqrt(2).
        CMatrix h = CMatrix::Zero(2, 4);
        h(0, 0) = 1.0;
        h(1, 2) = 1.0;
        const LinkBudget lb{bw, 1e6, 1.0};
        const auto eq = lmmse_equalize(ChannelMatrix(h, 1e9), lb);
        for (int i = 0; i < 2; ++i)
        {
            CHECK_THAT(eq.gain[i], WithinAbs(1.0, 1e-5));
            // No interference: error power is filtered noise (L L^H)_ii P_n alone.
            CHECK_THAT(eq.error_power[i], WithinRel((eq.equalizer * eq.equalizer.adjoint())(i, i).real(), 1e-12));
        }
        const double x = 0.5 * lb.snr();
        CHECK_THAT(rate_lmmse_two_layer(ChannelMatrix(h, 1e9), lb).rate, WithinRel(2.0 * bw * std::log2(1.0 + x), 1e-9));
    }
    SECTION("rank-one channel is interference limited")
    {
        oracle::Rng rng(13);
        CMatrix h = iid(rng).entries();
        h.row(1) = h.row(0);
        double last = 0.0;
        for (double pn : {1e-2, 1e-4, 1e-6, 1e-8})
        {
            const LinkBudget lb{bw, 1.0, pn};
            const auto eq = lmmse_equalize(ChannelMatrix(h, 1e9), lb);
            CHECK_THAT(eq.sinr(0, 1.0), WithinRel(eq.sinr(1, 1.0), 1e-9));
            CHECK(eq.sinr(0, 1.0) < 1.0);
            last = rate_lmmse_two_layer(ChannelMatrix(h, 1e9), lb).rate;
        }
        // Two-layer rate saturates at 2 B log2(2) as the noise vanishes.
        CHECK(last <= 2.0 * bw + 1e-6);
        CHECK(last > 1.99 * bw);
    }
    SECTION("per-layer SINR matches the closed form")
    {
        oracle::Rng rng(14);
        for (int trial = 0; trial < 1000; ++trial)
        {
            const auto ch = iid(rng);
            const double rho = std::pow(10.0, rng.uniform(-2.0, 4.0));
            const LinkBudget lb{bw, rho, 1.0};
            const auto eq = lmmse_equalize(ch, lb);
            const auto want = oracle::lmmse_sinr(ch.entries() * precoder(ch.entries()), rho);
            for (std::size_t i = 0; i < 2; ++i)
                CHECK_THAT(eq.sinr(i, rho), WithinRel(want[i], 1e-10));
        }
    }
    SECTION("zero channel")
    {
        CHECK_THROWS_AS(lmmse_equalize(ChannelMatrix(CMatrix::Zero(2, 4), 1e9), LinkBudget{bw, 1, 1}), LinkError);
    }
}

TEST_CASE("one-layer combining formula")
{
    const LinkBudget lb{bw, 3.0, 1.0};
    CHECK_THAT(one_layer_rate({0.7, 0.0}, {0.2, 123.0}, lb), WithinRel(bw * std::log2(1.0 + 0.49 * 3.0 / 0.2), 1e-14));
    CHECK_THAT(one_layer_rate({0.6, 0.6}, {0.1, 0.1}, lb), WithinRel(bw * std::log2(1.0 + 2.0 * 0.36 * 3.0 / 0.1), 1e-14));
    CHECK(one_layer_rate({0.0, 0.0}, {1.0, 1.0}, lb) == 0.0);
    CHECK_THROWS_AS(one_layer_rate({0.1}, {0.1, 0.2}, lb), LinkError);
}

TEST_CASE("one-layer LMMSE lies between the weaker layer and the SINR sum")
{
    // Gain-weighted combining of the equalized outputs: by Cauchy-Schwarz the
    // combined SINR is at most s1 + s2 and at least min(s1, s2).
    oracle::Rng rng(15);
    for (int trial = 0; trial < 2000; ++trial)
    {
        const auto ch = iid(rng);
        const auto lb = at_snr_db(rng.uniform(-10.0, 40.0));
        const auto one = rate_lmmse_one_layer(ch, lb);
        const auto &s = one.effective_sinr;
        CHECK(one.rate >= capacity(bw, std::min(s[0], s[1])) * (1.0 - 1e-12));
        CHECK(one.rate <= capacity(bw, s[0] + s[1]) * (1.0 + 1e-12));
    }
}

TEST_CASE("gain-weighted combining can lose to the stronger layer")
{
    // Equal gains but very unequal error powers: the weights ignore P_e.
    const LinkBudget lb{bw, 1.0, 1.0};
    const std::vector<double> gain{0.9, 0.9}, pe{0.01, 1.0};
    const double strong = capacity(bw, gain[0] * gain[0] / pe[0]);
    CHECK(one_layer_rate(gain, pe, lb) < strong);
}

TEST_CASE("optimal rate")
{
    oracle::Rng rng(16);
    SECTION("single receive port equals 1x1")
    {
        for (int trial = 0; trial < 100; ++trial)
        {
            const auto ch = iid(rng, 1, 16);
            const LinkBudget lb{bw, rng.uniform(0.01, 100.0), 1.0};
            CHECK_THAT(rate_optimal(ch, lb).rate, WithinRel(rate_miso_1x1(ch, lb).rate, 1e-12));
        }
    }
    SECTION("diagonal effective channel splits into scalar capacities")
    {
        CMatrix h = CMatrix::Zero(2, 3);
        h(0, 0) = 2.0;
        h(1, 1) = 1.0;
        // W = H^H / sqrt(5), G = diag(4, 1) / sqrt(5).
        const LinkBudget lb{bw, 7.0, 1.0};
        const double want = bw * (std::log2(1.0 + 7.0 * 16.0 / 5.0) + std::log2(1.0 + 7.0 / 5.0));
        const auto r = rate_optimal(ChannelMatrix(h, 1e9), lb);
        CHECK_THAT(r.rate, WithinRel(want, 1e-13));
        CHECK_THAT(r.per_layer[0], WithinRel(bw * std::log2(1.0 + 7.0 * 16.0 / 5.0), 1e-13));
    }
    SECTION("successive cancellation stages sum to log-det")
    {
        for (int trial = 0; trial < 1000; ++trial)
        {
            const auto ch = iid(rng);
            const auto lb = at_snr_db(rng.uniform(-20.0, 50.0));
            const auto r = rate_optimal(ch, lb);
            REQUIRE(r.per_layer.size() == 2);
            CHECK_THAT(sum(r.per_layer), WithinRel(r.rate, 1e-10));
            CHECK_THAT(r.rate, WithinRel(log_det_rate(ch, lb), 1e-15));
        }
    }
    SECTION("zero channel")
    {
        const auto r = rate_optimal(ChannelMatrix(CMatrix::Zero(2, 4), 1e9), LinkBudget{bw, 1, 1});
        CHECK(r.rate == 0.0);
        CHECK(r.zero_channel);
    }
}

TEST_CASE("scheme ordering at 10 dB")
{
    oracle::Rng rng(17);
    const auto lb = at_snr_db(10.0);
    for (int trial = 0; trial < 2000; ++trial)
    {
        const auto ch = iid(rng);
        const double opt = rate_optimal(ch, lb).rate;
        for (auto t : {BeamTarget::Row1, BeamTarget::Row2})
        {
            const double one = evaluate(Scheme::Miso1x1, ch, lb, t).rate;
            const double mrc = rate_mrc_2x1(ch, t, lb).rate;
            CHECK(one <= mrc);
            CHECK(mrc <= opt);
        }
        CHECK(rate_lmmse_two_layer(ch, lb).rate <= opt * (1.0 + 1e-12));
    }
}

TEST_CASE("MRC beats the power-split bound at very low SNR")
{
    // With W normalized over both layers, the low-SNR slope of the bound is
    // sum(s^4)/sum(s^2) < s_max^2, while single-beam MRC collects close to s_max^2.
    CMatrix h = CMatrix::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = 0.9;
    const auto lb = at_snr_db(-20.0);
    const ChannelMatrix ch(h, 1e9);
    CHECK(rate_mrc_2x1(ch, BeamTarget::Row1, lb).rate > rate_optimal(ch, lb).rate);
}

TEST_CASE("rates are monotone in power and linear in bandwidth")
{
    oracle::Rng rng(18);
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto ch = iid(rng);
        const double px = rng.uniform(0.1, 10.0), pn = rng.uniform(0.1, 10.0);
        const LinkBudget base{bw, px, pn}, more_px{bw, px * 1.5, pn}, more_pn{bw, px, pn * 1.5}, wide{3 * bw, px, pn};
        for (auto s : all_schemes)
        {
            const double r = evaluate(s, ch, base).rate;
            CHECK(evaluate(s, ch, more_px).rate > r);
            CHECK(evaluate(s, ch, more_pn).rate < r);
            CHECK_THAT(evaluate(s, ch, wide).rate, WithinRel(3.0 * r, 1e-13));
            CHECK(r >= 0.0);
        }
    }
}

TEST_CASE("budget validation and scheme names")
{
    oracle::Rng rng(19);
    const auto ch = iid(rng);
    CHECK_THROWS_AS(rate_optimal(ch, LinkBudget{0.0, 1, 1}), LinkError);
    CHECK_THROWS_AS(rate_optimal(ch, LinkBudget{bw, -1, 1}), LinkError);
    CHECK_THROWS_AS(rate_optimal(ch, LinkBudget{bw, 1, 0}), LinkError);
    CHECK_THROWS_AS(rate_optimal(ch, LinkBudget{bw, 1, std::nan("")}), LinkError);
    for (auto s : all_schemes)
        CHECK(scheme_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(scheme_from_string("mmse"), LinkError);
}
