// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#include "portlink/multiport.hpp"
#include "portlink/error.hpp"

#include <algorithm>
#include <limits>

namespace portlink::multiport
{
    TerminationSet TerminationSet::matched(std::size_t n_tx, std::size_t n_rx)
    {
        return {ScatteringMatrix::zero(n_tx), ScatteringMatrix::zero(n_rx)};
    }

    double condition_number(const CMatrix &m)
    {
        Eigen::JacobiSVD<CMatrix> svd(m);
        const auto &sv = svd.singularValues();
        const double smin = sv(sv.size() - 1);
        if (smin == 0.0)
            return std::numeric_limits<double>::infinity();
        return sv(0) / smin;
    }

    namespace
    {
        void check_invertible(const CMatrix &factor, const char *name)
        {
            const double cond = condition_number(factor);
            if (!(cond < max_condition_number))
                throw ResonanceError(name, cond);
        }
    }

    ChannelMatrix cascade_channel(const ScatteringMatrix &s_t, const ScatteringMatrix &s_r,
                                  const ChannelMatrix &s_rt, const TerminationSet &term)
    {
        const std::size_t n_tx = s_rt.n_tx(), n_rx = s_rt.n_rx();
        if (s_t.dim() != n_tx)
            throw MultiportError("transmit antenna has " + std::to_string(s_t.dim()) + " ports, S_RT has " +
                                 std::to_string(n_tx) + " columns");
        if (s_r.dim() != n_rx)
            throw MultiportError("receive antenna has " + std::to_string(s_r.dim()) + " ports, S_RT has " +
                                 std::to_string(n_rx) + " rows");
        if (term.source.dim() != n_tx || term.load.dim() != n_rx)
            throw MultiportError("termination dimensions do not match the antenna networks");
        if (!term.source.is_passive() || !term.load.is_passive())
            throw MultiportError("terminations must be passive");

        const auto tx = static_cast<Eigen::Index>(n_tx);
        const auto rx = static_cast<Eigen::Index>(n_rx);
        const CMatrix &ss = term.source.entries();
        const CMatrix &sl = term.load.entries();
        const CMatrix i_tx = CMatrix::Identity(tx, tx);
        const CMatrix i_rx = CMatrix::Identity(rx, rx);

        // Right factor (I - S_S S_T)^-1 (I - S_S), left factor (I + S_L)(I - S_R S_L)^-1.
        const CMatrix tx_factor = i_tx - ss * s_t.entries();
        check_invertible(tx_factor, "[I - S_S S_T]");
        const CMatrix right = Eigen::PartialPivLU<CMatrix>(tx_factor).solve(i_tx - ss);

        const CMatrix rx_factor = i_rx - s_r.entries() * sl;
        check_invertible(rx_factor, "[I - S_R S_L]");
        // X (I - S_R S_L) = (I + S_L)  <=>  (I - S_R S_L)^T X^T = (I + S_L)^T
        const CMatrix left = Eigen::PartialPivLU<CMatrix>(rx_factor.transpose())
                                 .solve((i_rx + sl).transpose())
                                 .transpose();

        return ChannelMatrix(left * s_rt.entries() * right, s_rt.frequency());
    }

    double frobenius_norm(const ChannelMatrix &m)
    {
        return m.entries().norm();
    }

    ScatteringMatrix interpolate_network(const touchstone::TouchstoneNetwork &net, double frequency_hz)
    {
        const auto &pts = net.points();
        if (!(frequency_hz >= net.min_frequency() && frequency_hz <= net.max_frequency()))
            throw MultiportError("frequency " + std::to_string(frequency_hz) + " Hz outside network sweep [" +
                                 std::to_string(net.min_frequency()) + ", " + std::to_string(net.max_frequency()) +
                                 "] Hz");
        auto hi = std::lower_bound(pts.begin(), pts.end(), frequency_hz,
                                   [](const touchstone::NetworkPoint &p, double f) { return p.frequency_hz < f; });
        if (hi->frequency_hz == frequency_hz)
            return hi->matrix;
        auto lo = std::prev(hi);
        const double t = (frequency_hz - lo->frequency_hz) / (hi->frequency_hz - lo->frequency_hz);
        return ScatteringMatrix((1.0 - t) * lo->matrix.entries() + t * hi->matrix.entries());
    }
}
