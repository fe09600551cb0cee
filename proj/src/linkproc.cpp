// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#include "portlink/linkproc.hpp"
#include "portlink/error.hpp"

#include <cmath>
#include <numbers>

namespace portlink::linkproc
{
    void LinkBudget::validate() const
    {
        if (!(bandwidth > 0.0) || !(signal_power > 0.0) || !(noise_power > 0.0) || !std::isfinite(bandwidth) ||
            !std::isfinite(signal_power) || !std::isfinite(noise_power))
            throw LinkError("link budget needs finite, strictly positive bandwidth, signal and noise power");
    }

    std::string to_string(Scheme scheme)
    {
        switch (scheme)
        {
        case Scheme::Miso1x1:
            return "miso_1x1";
        case Scheme::Mrc2x1:
            return "mrc_2x1";
        case Scheme::LmmseOneLayer:
            return "lmmse_one_layer";
        case Scheme::LmmseTwoLayer:
            return "lmmse_two_layer";
        case Scheme::Optimal:
            return "optimal";
        }
        return "optimal";
    }

    Scheme scheme_from_string(const std::string &name)
    {
        for (auto s : all_schemes)
            if (to_string(s) == name)
                return s;
        throw LinkError("unknown scheme '" + name + "'");
    }

    double capacity(double bandwidth, double snr)
    {
        return bandwidth * std::log1p(snr) / std::numbers::ln2;
    }

    CMatrix precoder(const CMatrix &h)
    {
        return h.adjoint() / h.norm();
    }

    RateResult rate_miso_1x1(const ChannelMatrix &h, const LinkBudget &lb)
    {
        lb.validate();
        if (h.n_rx() != 1)
            throw LinkError("1x1 scheme needs a single-row channel, got " + std::to_string(h.n_rx()) + " rows");
        RateResult r;
        r.scheme = Scheme::Miso1x1;
        const double gain = h.entries().squaredNorm();
        if (gain == 0.0)
        {
            r.zero_channel = true;
            r.effective_sinr = {0.0};
            return r;
        }
        // |h^T w|^2 with w = h*/||h|| is ||h||^2.
        const double snr = gain * lb.snr();
        r.rate = capacity(lb.bandwidth, snr);
        r.effective_sinr = {snr};
        return r;
    }

    RateResult rate_mrc_2x1(const ChannelMatrix &h, BeamTarget target, const LinkBudget &lb)
    {
        lb.validate();
        const auto row = static_cast<Eigen::Index>(target == BeamTarget::Row1 ? 0 : 1);
        if (static_cast<std::size_t>(row) >= h.n_rx())
            throw LinkError("beam target row " + std::to_string(row + 1) + " does not exist");
        const CMatrix &m = h.entries();
        const double target_norm = m.row(row).norm();
        if (target_norm == 0.0)
            throw LinkError("MRC beam target row is zero");
        const CVector w = m.row(row).adjoint() / target_norm; // conj(h_t) / ||h_t||
        // Sum over receive ports of |h_r^T w|^2.
        const double combined = (m * w).squaredNorm();
        RateResult r;
        r.scheme = Scheme::Mrc2x1;
        const double snr = combined * lb.snr();
        r.rate = capacity(lb.bandwidth, snr);
        r.effective_sinr = {snr};
        return r;
    }

    EqualizedLayers lmmse_equalize(const ChannelMatrix &h, const LinkBudget &lb)
    {
        lb.validate();
        if (h.entries().norm() == 0.0)
            throw LinkError("LMMSE equalization of a zero channel");
        const CMatrix g = h.entries() * precoder(h.entries());
        const auto n = g.cols();
        const double px = lb.signal_power, pn = lb.noise_power;

        // L = P_x G^H (P_x G G^H + P_n I)^-1, computed as (P_x C^-1 G)^H.
        const CMatrix cov = px * g * g.adjoint() + pn * CMatrix::Identity(g.rows(), g.rows());
        Eigen::LLT<CMatrix> llt(cov);
        if (llt.info() != Eigen::Success)
            throw LinkError("LMMSE covariance is singular");
        const CMatrix l = (px * llt.solve(g)).adjoint();
        const CMatrix lg = l * g;
        const CMatrix llh = l * l.adjoint();

        EqualizedLayers out;
        out.effective = g;
        out.equalizer = l;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            double interference = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i)
                    interference += std::norm(lg(i, j));
            out.gain.push_back(lg(i, i).real());
            out.error_power.push_back(interference * px + llh(i, i).real() * pn);
        }
        return out;
    }

    RateResult rate_lmmse_two_layer(const ChannelMatrix &h, const LinkBudget &lb)
    {
        const auto eq = lmmse_equalize(h, lb);
        RateResult r;
        r.scheme = Scheme::LmmseTwoLayer;
        for (std::size_t i = 0; i < eq.gain.size(); ++i)
        {
            const double sinr = eq.sinr(i, lb.signal_power);
            r.effective_sinr.push_back(sinr);
            r.per_layer.push_back(capacity(lb.bandwidth, sinr));
            r.rate += r.per_layer.back();
        }
        return r;
    }

    double one_layer_rate(const std::vector<double> &gain, const std::vector<double> &error_power,
                          const LinkBudget &lb)
    {
        if (gain.size() != error_power.size())
            throw LinkError("layer gain and error power counts differ");
        double g2 = 0.0, noise = 0.0;
        for (std::size_t i = 0; i < gain.size(); ++i)
        {
            g2 += gain[i] * gain[i];
            noise += gain[i] * gain[i] * error_power[i];
        }
        if (g2 == 0.0)
            return 0.0;
        return capacity(lb.bandwidth, g2 * g2 * lb.signal_power / noise);
    }

    RateResult rate_lmmse_one_layer(const ChannelMatrix &h, const LinkBudget &lb)
    {
        const auto eq = lmmse_equalize(h, lb);
        RateResult r;
        r.scheme = Scheme::LmmseOneLayer;
        r.rate = one_layer_rate(eq.gain, eq.error_power, lb);
        for (std::size_t i = 0; i < eq.gain.size(); ++i)
            r.effective_sinr.push_back(eq.sinr(i, lb.signal_power));
        return r;
    }

    double log_det_rate(const ChannelMatrix &h, const LinkBudget &lb)
    {
        lb.validate();
        if (h.entries().norm() == 0.0)
            return 0.0;
        const CMatrix g = h.entries() * precoder(h.entries());
        const auto n = g.cols();
        const CMatrix m = CMatrix::Identity(n, n) + lb.snr() * g.adjoint() * g;
        Eigen::LLT<CMatrix> llt(m);
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            log_det += 2.0 * std::log(llt.matrixL()(i, i).real());
        return lb.bandwidth * log_det / std::numbers::ln2;
    }

    RateResult rate_optimal(const ChannelMatrix &h, const LinkBudget &lb)
    {
        lb.validate();
        RateResult r;
        r.scheme = Scheme::Optimal;
        if (h.entries().norm() == 0.0)
        {
            r.zero_channel = true;
            return r;
        }
        const CMatrix g = h.entries() * precoder(h.entries());
        const auto n_rx = g.rows(), layers = g.cols();
        const double rho = lb.snr();
        // Stage k sees the not-yet-decoded layers j > k as coloured noise.
        for (Eigen::Index k = 0; k < layers; ++k)
        {
            CMatrix a = CMatrix::Identity(n_rx, n_rx);
            for (Eigen::Index j = k + 1; j < layers; ++j)
                a += rho * g.col(j) * g.col(j).adjoint();
            const double sinr = rho * (g.col(k).adjoint() * Eigen::LLT<CMatrix>(a).solve(g.col(k)))(0, 0).real();
            r.effective_sinr.push_back(sinr);
            r.per_layer.push_back(capacity(lb.bandwidth, sinr));
        }
        r.rate = log_det_rate(h, lb);
        return r;
    }

    RateResult evaluate(Scheme scheme, const ChannelMatrix &h, const LinkBudget &lb, BeamTarget target)
    {
        switch (scheme)
        {
        case Scheme::Miso1x1:
            return rate_miso_1x1(h.n_rx() == 1 ? h : h.row(target == BeamTarget::Row1 ? 0 : 1), lb);
        case Scheme::Mrc2x1:
            return rate_mrc_2x1(h, target, lb);
        case Scheme::LmmseOneLayer:
            return rate_lmmse_one_layer(h, lb);
        case Scheme::LmmseTwoLayer:
            return rate_lmmse_two_layer(h, lb);
        case Scheme::Optimal:
            return rate_optimal(h, lb);
        }
        throw LinkError("unknown scheme");
    }
}
