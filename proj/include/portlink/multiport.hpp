// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

#include "portlink/touchstone.hpp"
#include "portlink/types.hpp"

namespace portlink::multiport
{
    // Condition number above which an inverted cascade factor is treated as a
    // resonance rather than an ordinary matrix.
    inline constexpr double max_condition_number = 1e12;

    // Source (generator + matching) and load (LNA + matching) terminations.
    struct TerminationSet
    {
        ScatteringMatrix source; // dim = number of transmit ports
        ScatteringMatrix load;   // dim = number of receive ports

        // 50 ohm terminations on both sides: zero reflection.
        static TerminationSet matched(std::size_t n_tx, std::size_t n_rx);
    };

    // End-to-end voltage transfer of the cascade generator -> transmit antenna ->
    // propagation -> receive antenna -> load:
    //
    //   H = (I + S_L)(I - S_R S_L)^-1 S_RT (I - S_S S_T)^-1 (I - S_S)
    //
    // Throws MultiportError on dimension mismatch or non-passive terminations and
    // ResonanceError when an inverted factor is numerically singular.
    ChannelMatrix cascade_channel(const ScatteringMatrix &s_t, const ScatteringMatrix &s_r,
                                  const ChannelMatrix &s_rt, const TerminationSet &term);

    double frobenius_norm(const ChannelMatrix &m);

    // Entrywise linear interpolation of real and imaginary parts between the
    // bracketing sweep points. Exact at grid frequencies.
    ScatteringMatrix interpolate_network(const touchstone::TouchstoneNetwork &net, double frequency_hz);

    // sigma_max / sigma_min, +inf for singular input.
    double condition_number(const CMatrix &m);
}
