// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

#include "portlink/linkproc.hpp"
#include "portlink/types.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace portlink::analysis
{
    struct CurvePoint
    {
        double rate; // bit/s
        double cdf;
    };

    // Empirical throughput CDF stored as the sorted sample staircase: the i-th
    // smallest sample carries cdf = (i + 1) / n.
    struct OutageCurve
    {
        linkproc::Scheme scheme;
        std::vector<CurvePoint> points;
        std::size_t n_samples = 0;
        linkproc::LinkBudget budget;

        // #{samples <= rate} / n, by binary search.
        double outage_probability(double rate) const;
        // Smallest sample whose cdf reaches `probability`.
        double rate_at(double probability) const;
        double median() const;
    };

    // Throws AnalysisError for empty or non-finite input.
    OutageCurve outage_cdf(std::span<const double> rates, linkproc::Scheme scheme, const linkproc::LinkBudget &budget);

    // log10(p_2x1) / log10(p_1x1) at the threshold rate. Throws
    // ThresholdRangeError, carrying a nearby admissible threshold, when either
    // outage probability is 0 or 1.
    double diversity_gain(const OutageCurve &curve_2x1, const OutageCurve &curve_1x1, double threshold_rate);

    struct SnrPoint
    {
        double snr_db;
        double median_rate; // bit/s
    };

    // Least-squares slope of median_rate / B against log2(SNR). Needs at least two
    // points spanning 10 dB or more.
    double multiplexing_gain(std::span<const SnrPoint> points, double bandwidth);

    // Envelope correlation coefficient of a lossless 2-port from its S-matrix.
    // Throws AnalysisError when a port efficiency term is not positive.
    double ecc_from_sparams(const ScatteringMatrix &s);

    // 20 log10 |S21|
    double isolation_db(const ScatteringMatrix &s);

    struct GainReport
    {
        std::optional<double> diversity_gain;
        std::optional<double> multiplexing_gain;
        std::optional<double> ecc;
        std::optional<double> isolation_db;
        std::optional<double> threshold_rate;
        std::vector<double> snr_points;
        std::vector<std::string> notes;
    };

    // Writes `scheme,snr_db,rate_bps,cdf` with a header row.
    void write_curve_csv(std::ostream &out, const OutageCurve &curve, double snr_db);

    std::string gain_report_json(const GainReport &report);
}
