// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

// Stochastic experiments shared by the unit and acceptance suites.

#include "portlink/analysis.hpp"
#include "portlink/ensemble.hpp"
#include "portlink/linkproc.hpp"
#include "portlink/parallel.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace scenario
{
    using namespace portlink;

    inline CMatrix rx_correlation(double rho)
    {
        CMatrix c(2, 2);
        c << 1.0, rho, rho, 1.0;
        return c;
    }

    // Rates of `scheme` over every user of an ensemble.
    inline std::vector<double> rates(const propagation::ChannelEnsemble &ens, linkproc::Scheme scheme,
                                     const linkproc::LinkBudget &lb, unsigned threads = 1)
    {
        std::vector<double> out(ens.users.size());
        parallel_for(ens.users.size(), threads, [&](std::size_t u) {
            out[u] = linkproc::evaluate(scheme, ens.users[u].h, lb, linkproc::BeamTarget::Row1).rate;
        });
        return out;
    }

    struct DiversityRun
    {
        double gain;
        double threshold;
    };

    // 2x1 MRC against the 1x1 link of receive port 1, threshold at the given
    // 1x1 outage quantile.
    inline DiversityRun diversity(std::size_t users, std::size_t n_tx, double rho, std::uint64_t seed,
                                  double quantile = 0.1)
    {
        const auto ens = propagation::generate_stochastic_ensemble(users, 2, n_tx, rx_correlation(rho), seed);
        const linkproc::LinkBudget lb{10e6, 1.0, 0.1};
        const auto r1 = rates(ens, linkproc::Scheme::Miso1x1, lb);
        const auto r2 = rates(ens, linkproc::Scheme::Mrc2x1, lb);
        const auto c1 = analysis::outage_cdf(r1, linkproc::Scheme::Miso1x1, lb);
        const auto c2 = analysis::outage_cdf(r2, linkproc::Scheme::Mrc2x1, lb);
        const double thr = c1.rate_at(quantile);
        return {analysis::diversity_gain(c2, c1, thr), thr};
    }

    // Median optimal rate per SNR point, then the fitted slope.
    inline double optimal_slope(std::size_t users, std::size_t n_tx, double rho, std::uint64_t seed,
                                const std::vector<double> &snr_db)
    {
        const auto ens = propagation::generate_stochastic_ensemble(users, 2, n_tx, rx_correlation(rho), seed);
        const double bw = 10e6;
        std::vector<analysis::SnrPoint> pts;
        for (double s : snr_db)
        {
            const linkproc::LinkBudget lb{bw, std::pow(10.0, s / 10.0), 1.0};
            const auto c = analysis::outage_cdf(rates(ens, linkproc::Scheme::Optimal, lb), linkproc::Scheme::Optimal, lb);
            pts.push_back({s, c.median()});
        }
        return analysis::multiplexing_gain(pts, bw);
    }
}
