// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

#include "portlink/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace portlink::linkproc
{
    // Bandwidth B [Hz], per-stream transmit power P_x [W] and per-port noise
    // power P_n [W]. All strictly positive.
    struct LinkBudget
    {
        double bandwidth;
        double signal_power;
        double noise_power;

        void validate() const;
        double snr() const { return signal_power / noise_power; }
    };

    enum class Scheme
    {
        Miso1x1,
        Mrc2x1,
        LmmseOneLayer,
        LmmseTwoLayer,
        Optimal
    };

    std::string to_string(Scheme scheme);
    Scheme scheme_from_string(const std::string &name);
    inline constexpr Scheme all_schemes[] = {Scheme::Miso1x1, Scheme::Mrc2x1, Scheme::LmmseOneLayer,
                                             Scheme::LmmseTwoLayer, Scheme::Optimal};

    struct RateResult
    {
        Scheme scheme = Scheme::Optimal;
        double rate = 0.0; // bit/s
        std::vector<double> per_layer;
        std::vector<double> effective_sinr;
        bool zero_channel = false;
    };

    enum class BeamTarget
    {
        Row1,
        Row2
    };

    // B log2(1 + snr), accurate for small snr.
    double capacity(double bandwidth, double snr);

    // Single receive antenna (1 x n_tx), maximal-ratio transmission w = h*/||h||.
    // A zero channel yields rate 0 with zero_channel set.
    RateResult rate_miso_1x1(const ChannelMatrix &h, const LinkBudget &lb);

    // MRT toward the target row, maximal-ratio combining of both receive ports.
    // Throws LinkError if the target row is zero.
    RateResult rate_mrc_2x1(const ChannelMatrix &h, BeamTarget target, const LinkBudget &lb);

    // Per-layer quantities after LMMSE equalization of G = H W, W = H^H / ||H||_F.
    struct EqualizedLayers
    {
        std::vector<double> gain;        // (L G)_ii, real in [0, 1)
        std::vector<double> error_power; // interference + filtered noise, W
        CMatrix effective;               // G
        CMatrix equalizer;               // L

        double sinr(std::size_t i, double signal_power) const
        {
            return gain[i] * gain[i] * signal_power / error_power[i];
        }
    };

    // Throws LinkError for a zero channel.
    EqualizedLayers lmmse_equalize(const ChannelMatrix &h, const LinkBudget &lb);

    RateResult rate_lmmse_two_layer(const ChannelMatrix &h, const LinkBudget &lb);

    // One data stream carried on every layer, equalized outputs combined with
    // weights equal to the layer gains.
    RateResult rate_lmmse_one_layer(const ChannelMatrix &h, const LinkBudget &lb);

    // Combining of already equalized layers, exposed for testing the formula.
    double one_layer_rate(const std::vector<double> &gain, const std::vector<double> &error_power,
                          const LinkBudget &lb);

    // B log2 det(I + (P_x/P_n) G^H G) with G = H W, W = H^H / ||H||_F. per_layer
    // holds the MMSE-SIC stage rates (layer 1 decoded first) whose sum is the
    // log-det value.
    RateResult rate_optimal(const ChannelMatrix &h, const LinkBudget &lb);

    // log-det route alone, without the successive-cancellation decomposition.
    double log_det_rate(const ChannelMatrix &h, const LinkBudget &lb);

    // MRT/MRC precoder W = H^H / ||H||_F and effective channel G = H W.
    CMatrix precoder(const CMatrix &h);

    RateResult evaluate(Scheme scheme, const ChannelMatrix &h, const LinkBudget &lb,
                        BeamTarget target = BeamTarget::Row1);
}
