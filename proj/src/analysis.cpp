// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#include "portlink/analysis.hpp"
#include "portlink/error.hpp"
#include "portlink/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace portlink::analysis
{
    double OutageCurve::outage_probability(double rate) const
    {
        auto it = std::upper_bound(points.begin(), points.end(), rate,
                                   [](double r, const CurvePoint &p) { return r < p.rate; });
        return static_cast<double>(it - points.begin()) / static_cast<double>(n_samples);
    }

    double OutageCurve::rate_at(double probability) const
    {
        if (!(probability > 0.0 && probability <= 1.0))
            throw AnalysisError("outage probability must lie in (0, 1]");
        auto it = std::lower_bound(points.begin(), points.end(), probability,
                                   [](const CurvePoint &p, double q) { return p.cdf < q; });
        return it == points.end() ? points.back().rate : it->rate;
    }

    double OutageCurve::median() const
    {
        const std::size_t n = points.size();
        if (n % 2 == 1)
            return points[n / 2].rate;
        return 0.5 * (points[n / 2 - 1].rate + points[n / 2].rate);
    }

    OutageCurve outage_cdf(std::span<const double> rates, linkproc::Scheme scheme, const linkproc::LinkBudget &budget)
    {
        if (rates.empty())
            throw AnalysisError("outage curve needs at least one sample");
        std::vector<double> sorted(rates.begin(), rates.end());
        for (double r : sorted)
            if (!std::isfinite(r))
                throw AnalysisError("non-finite rate sample");
        std::sort(sorted.begin(), sorted.end());
        OutageCurve c{scheme, {}, sorted.size(), budget};
        c.points.reserve(sorted.size());
        const double n = static_cast<double>(sorted.size());
        for (std::size_t i = 0; i < sorted.size(); ++i)
            c.points.push_back({sorted[i], static_cast<double>(i + 1) / n});
        return c;
    }

    double diversity_gain(const OutageCurve &curve_2x1, const OutageCurve &curve_1x1, double threshold_rate)
    {
        const double p2 = curve_2x1.outage_probability(threshold_rate);
        const double p1 = curve_1x1.outage_probability(threshold_rate);
        if (p2 > 0.0 && p2 < 1.0 && p1 > 0.0 && p1 < 1.0)
            return std::log10(p2) / std::log10(p1);

        // Admissible thresholds: at or above both minima, below both maxima.
        const double lo = std::max(curve_2x1.points.front().rate, curve_1x1.points.front().rate);
        const double hi = std::min(curve_2x1.points.back().rate, curve_1x1.points.back().rate);
        double suggested = std::clamp(threshold_rate, lo, hi);
        if (curve_2x1.outage_probability(suggested) >= 1.0 || curve_1x1.outage_probability(suggested) >= 1.0)
            suggested = std::nextafter(hi, lo);
        throw ThresholdRangeError(threshold_rate, suggested);
    }

    double multiplexing_gain(std::span<const SnrPoint> points, double bandwidth)
    {
        if (points.size() < 2)
            throw AnalysisError("multiplexing gain needs at least two SNR points");
        if (!(bandwidth > 0.0))
            throw AnalysisError("bandwidth must be positive");
        auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                            [](const SnrPoint &a, const SnrPoint &b) { return a.snr_db < b.snr_db; });
        if (hi->snr_db - lo->snr_db < 10.0)
            throw AnalysisError("insufficient SNR span for multiplexing gain (need >= 10 dB)");

        // log2(10^(dB/10)) = dB * log2(10) / 10
        const double k = std::log2(10.0) / 10.0;
        double mx = 0.0, my = 0.0;
        for (const auto &p : points)
        {
            mx += p.snr_db * k;
            my += p.median_rate / bandwidth;
        }
        mx /= static_cast<double>(points.size());
        my /= static_cast<double>(points.size());
        double sxy = 0.0, sxx = 0.0;
        for (const auto &p : points)
        {
            const double dx = p.snr_db * k - mx;
            sxy += dx * (p.median_rate / bandwidth - my);
            sxx += dx * dx;
        }
        return sxy / sxx;
    }

    double ecc_from_sparams(const ScatteringMatrix &s)
    {
        if (s.dim() != 2)
            throw AnalysisError("ECC needs a 2-port S-matrix");
        const cdouble s11 = s(0, 0), s12 = s(0, 1), s21 = s(1, 0), s22 = s(1, 1);
        const double e1 = 1.0 - std::norm(s11) - std::norm(s21);
        const double e2 = 1.0 - std::norm(s22) - std::norm(s12);
        if (!(e1 > 0.0) || !(e2 > 0.0))
            throw AnalysisError("port efficiency degenerate: 1 - |S11|^2 - |S21|^2 = " + format_number(e1) +
                                ", 1 - |S22|^2 - |S12|^2 = " + format_number(e2));
        return std::norm(std::conj(s11) * s12 + std::conj(s21) * s22) / (e1 * e2);
    }

    double isolation_db(const ScatteringMatrix &s)
    {
        if (s.dim() != 2)
            throw AnalysisError("isolation needs a 2-port S-matrix");
        return 20.0 * std::log10(std::abs(s(1, 0)));
    }

    void write_curve_csv(std::ostream &out, const OutageCurve &curve, double snr_db)
    {
        out << "scheme,snr_db,rate_bps,cdf\n";
        const std::string scheme = linkproc::to_string(curve.scheme);
        const std::string snr = format_number(snr_db);
        for (const auto &p : curve.points)
            out << scheme << ',' << snr << ',' << format_number(p.rate) << ',' << format_number(p.cdf) << '\n';
    }

    std::string gain_report_json(const GainReport &report)
    {
        nlohmann::ordered_json j;
        j["schema"] = "portlink-gain-report";
        j["version"] = 1;
        auto opt = [](const std::optional<double> &v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
        j["diversity_gain"] = opt(report.diversity_gain);
        j["multiplexing_gain"] = opt(report.multiplexing_gain);
        j["ecc"] = opt(report.ecc);
        j["isolation_db"] = opt(report.isolation_db);
        j["threshold_rate_bps"] = opt(report.threshold_rate);
        j["snr_points_db"] = report.snr_points;
        j["notes"] = report.notes;
        return j.dump(2) + "\n";
    }
}
